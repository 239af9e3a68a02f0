//! Central charges on the filtered class lattice.
//!
//! A weak stability datum evaluates a class through the top nonvanishing
//! layer of the filtration `level 0 < level 1 < level 2`.  Two parameter
//! families are implemented: the large volume family (B-field plus a
//! positive fiber polarization `t`) and the noncommutative point family
//! (a complex unit `z0` twisting the level 0 layer).  Both land in the
//! closed upper half plane slit at the positive real axis, so phases are
//! well defined and comparable exactly.
//!
//! Paths of charges sweep one real parameter.  A wall for a level 0 class
//! `v` is a path time where `Z(v)` aligns with `Z(O) = Z(0, 0, 1)` on the
//! positive ray.  Wall times solve a linear equation in exact rationals;
//! crossing directions are decided by two-sided phase probes at `t* ± δ`
//! with `δ` below every inter-wall gap.

use crate::error::{Error, Result};
use crate::exact::{rat, rat_int, rat_to_f64, CRat, Phase, Rat};
use crate::lattice::{FlopModel, GammaClass, SupportKind};
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// Weak stability datum: the central charge triple `(Z0, Z1, Z2)`
/// packaged with its defining parameters.
///
/// The B-field is `b * H` on the exceptional pairing, the level 1 charge
/// is `-i * omega_prime * (degree over the base)`, and the level 2 charge
/// is `z * rank` (`z1 * rank` for the point family).
#[derive(Clone, Debug, PartialEq)]
pub enum CentralCharge {
    /// `xi = (1, -(B + i t H), -i omega', z)`: level 0 evaluates
    /// `(s, l) -> s - (B + i t H) . l` on the heart class `(s, l)`.
    LargeVolume {
        b: Rat,
        t: Rat,
        omega_prime: Rat,
        z: CRat,
    },
    /// `xi = (-z0, z0 B, -i omega', z1)`: level 0 evaluates
    /// `(s, l) -> z0 (-s + B . l)`.
    NcPoint {
        p: i8,
        b: Rat,
        omega_prime: Rat,
        z0: CRat,
        z1: CRat,
    },
}

/// True when `arg z` lies in the open interval `(pi/2, pi)`.
fn arg_open_upper_left(z: &CRat) -> bool {
    z.im.is_positive() && z.re.is_negative()
}

/// True when `arg z` lies in the half open interval `(pi/2, pi]`.
fn arg_closed_upper_left(z: &CRat) -> bool {
    arg_open_upper_left(z) || (z.im.is_zero() && z.re.is_negative())
}

fn check_p(p: i8) -> Result<()> {
    if p == 0 || p == -1 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "perversity {p} outside {{0, -1}}"
        )))
    }
}

/// True when the B-field `b * H` satisfies the sign-twisted region
/// inequalities: `(-1)^p B . C < 0` on every exceptional generator and
/// `(-1)^p B . Z > -1` on every fundamental fiber cycle.
pub fn pv_contains(model: &FlopModel, p: i8, b: &Rat) -> Result<bool> {
    check_p(p)?;
    let sign = if p == 0 { rat_int(1) } else { rat_int(-1) };
    for &coord in &model.exceptional_coords {
        let mut gen = model.zero_beta();
        gen[coord] = 1;
        let pairing = &sign * b * rat_int(model.h_degree(&gen));
        if !pairing.is_negative() {
            return Ok(false);
        }
    }
    for cycle in &model.fiber_cycles {
        let pairing = &sign * b * rat_int(model.h_degree(cycle));
        if pairing <= rat_int(-1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Generator classes of the heart attached to perversity `p`: the point
/// class, one flipped exceptional curve per generator, and one fiber
/// cycle class per contracted fiber.  Every heart object is an iterated
/// extension of objects with these classes, so checking that their
/// charges land in the upper half plane certifies the whole heart.
pub fn heart_generators(model: &FlopModel, p: i8) -> Result<Vec<GammaClass>> {
    check_p(p)?;
    let sign: i64 = if p == 0 { -1 } else { 1 };
    let mut gens = vec![GammaClass::curve(-1, model.zero_beta())];
    for &coord in &model.exceptional_coords {
        let mut beta = model.zero_beta();
        beta[coord] = sign;
        gens.push(GammaClass::curve(0, beta));
    }
    for cycle in &model.fiber_cycles {
        let beta: Vec<i64> = cycle.iter().map(|&c| -sign * c).collect();
        gens.push(GammaClass::curve(-1, beta));
    }
    Ok(gens)
}

impl CentralCharge {
    /// Large volume datum; requires `t > 0`, `omega_prime > 0`, and
    /// `arg z` in the open interval `(pi/2, pi)`.
    pub fn large_volume(b: Rat, t: Rat, omega_prime: Rat, z: CRat) -> Result<Self> {
        if !t.is_positive() {
            return Err(Error::Domain(format!(
                "large volume parameter t = {t} must be positive"
            )));
        }
        if !omega_prime.is_positive() {
            return Err(Error::Domain("omega_prime must be positive".into()));
        }
        if !arg_open_upper_left(&z) {
            return Err(Error::Domain(format!(
                "arg z must lie in (pi/2, pi); got z = {z}"
            )));
        }
        Ok(CentralCharge::LargeVolume {
            b,
            t,
            omega_prime,
            z,
        })
    }

    /// Large volume datum with no parameter checks.  Used for probes on
    /// the flopped side of a path where `t < 0` continues the same
    /// evaluation formula outside the validated region.
    pub(crate) fn large_volume_raw(b: Rat, t: Rat, omega_prime: Rat, z: CRat) -> Self {
        CentralCharge::LargeVolume {
            b,
            t,
            omega_prime,
            z,
        }
    }

    /// Noncommutative point datum; requires `b * H` in the sign-twisted
    /// region for `p`, `arg z0` and `arg z1` in `(pi/2, pi]`, and
    /// `z1 != -1`.
    pub fn nc_point(
        model: &FlopModel,
        p: i8,
        b: Rat,
        omega_prime: Rat,
        z0: CRat,
        z1: CRat,
    ) -> Result<Self> {
        if !pv_contains(model, p, &b)? {
            return Err(Error::Domain(format!(
                "B-field {b} * H outside the perversity {p} region"
            )));
        }
        if !omega_prime.is_positive() {
            return Err(Error::Domain("omega_prime must be positive".into()));
        }
        for (name, value) in [("z0", &z0), ("z1", &z1)] {
            if !arg_closed_upper_left(value) {
                return Err(Error::Domain(format!(
                    "arg {name} must lie in (pi/2, pi]; got {name} = {value}"
                )));
            }
        }
        if z1 == CRat::from_ints(-1, 0) {
            return Err(Error::Domain("z1 = -1 is excluded".into()));
        }
        Ok(CentralCharge::NcPoint {
            p,
            b,
            omega_prime,
            z0,
            z1,
        })
    }

    /// B-field coefficient `b` (the datum is `B = b * H`).
    pub fn b(&self) -> &Rat {
        match self {
            CentralCharge::LargeVolume { b, .. } => b,
            CentralCharge::NcPoint { b, .. } => b,
        }
    }

    /// Evaluates the charge on `v` through the top nonvanishing
    /// filtration layer of `v`.
    pub fn evaluate(&self, model: &FlopModel, v: &GammaClass) -> CRat {
        match model.filtration_level(v) {
            2 => {
                let unit = match self {
                    CentralCharge::LargeVolume { z, .. } => z,
                    CentralCharge::NcPoint { z1, .. } => z1,
                };
                unit.scale(&rat_int(v.r))
            }
            1 => {
                let omega_prime = match self {
                    CentralCharge::LargeVolume { omega_prime, .. } => omega_prime,
                    CentralCharge::NcPoint { omega_prime, .. } => omega_prime,
                };
                let deg = rat_int(model.y_degree(&v.beta));
                CRat::new(Rat::zero(), -(omega_prime * deg))
            }
            _ => {
                let d = rat_int(model.h_degree(&v.beta));
                match self {
                    // Z0(s, l) = s - (B + i t H) . l at (s, l) = (n, beta).
                    CentralCharge::LargeVolume { b, t, .. } => {
                        CRat::new(rat_int(v.n) - b * &d, -(t * &d))
                    }
                    // Z0(s, l) = z0 (-s + B . l).
                    CentralCharge::NcPoint { b, z0, .. } => {
                        z0.scale(&(b * &d - rat_int(v.n)))
                    }
                }
            }
        }
    }

    /// Charge of the reference class `(0, 0, 1)`.
    pub fn reference(&self, model: &FlopModel) -> CRat {
        self.evaluate(model, &GammaClass::structure_sheaf(model.rank_n1))
    }

    /// Exact phase of `Z(v)`; errors when the value is zero or falls
    /// outside the closed upper half plane.
    pub fn phase(&self, model: &FlopModel, v: &GammaClass) -> Result<Phase> {
        Phase::of(&self.evaluate(model, v))
    }

    /// Approximate phase in `(0, 1]` (half turns), for reports.
    pub fn phase_float(&self, model: &FlopModel, v: &GammaClass) -> Result<f64> {
        Ok(self.phase(model, v)?.to_f64())
    }

    /// Region membership test.
    pub fn in_region(&self, model: &FlopModel, region: &RegionSpec) -> Result<bool> {
        match region {
            RegionSpec::UX => Ok(match self {
                CentralCharge::LargeVolume {
                    t, omega_prime, z, ..
                } => t.is_positive() && omega_prime.is_positive() && arg_open_upper_left(z),
                CentralCharge::NcPoint { .. } => false,
            }),
            RegionSpec::UXB { b } => {
                Ok(self.in_region(model, &RegionSpec::UX)? && self.b() == b)
            }
            RegionSpec::PV { p } => pv_contains(model, *p, self.b()),
            RegionSpec::PU { p } => Ok(match self {
                CentralCharge::LargeVolume { .. } => false,
                CentralCharge::NcPoint {
                    p: own,
                    b,
                    omega_prime,
                    z0,
                    z1,
                } => {
                    own == p
                        && pv_contains(model, *p, b)?
                        && omega_prime.is_positive()
                        && arg_closed_upper_left(z0)
                        && arg_closed_upper_left(z1)
                        && *z1 != CRat::from_ints(-1, 0)
                }
            }),
        }
    }
}

/// Parameter regions for the two charge families.
#[derive(Clone, Debug, PartialEq)]
pub enum RegionSpec {
    /// Large volume region: `t > 0`, `arg z` in `(pi/2, pi)`.
    UX,
    /// Slice of `UX` at a fixed B-field.
    UXB { b: Rat },
    /// B-field region for perversity `p` (condition on `b` only).
    PV { p: i8 },
    /// Full parameter region of the point family at perversity `p`.
    PU { p: i8 },
}

/// One-parameter family of charges.  All three variants are traversed
/// with increasing `t`.
#[derive(Clone, Debug)]
pub enum ChargePath {
    /// Large volume ray `t in (0, inf)` at a fixed B-field.
    OmegaRay { b: Rat, omega_prime: Rat, z: CRat },
    /// Continuation of the same evaluation formula to `t in (-inf, 0)`;
    /// charges on this side are large volume data of the flopped model.
    FlopRay { b: Rat, omega_prime: Rat, z: CRat },
    /// Segment `t in [0, 1]` interpolating the level 0 unit linearly:
    /// `z0(t) = (1 - t) z0_start + t z0_end` at fixed `z1`.
    LinearXi {
        p: i8,
        b: Rat,
        omega_prime: Rat,
        z0_start: CRat,
        z0_end: CRat,
        z1: CRat,
    },
}

/// Wall times and crossing signs of a path, with the probe data that
/// certified them.
#[derive(Clone, Debug)]
pub struct GoodPath {
    /// True when every box class crosses transversally and all classes
    /// on one wall agree on the crossing direction.
    pub good: bool,
    /// `(t*, epsilon)` sorted by wall time; complete only when `good`.
    pub events: Vec<(Rat, i8)>,
    /// Two-sided probe offset, below every inter-wall gap.
    pub delta: Option<Rat>,
    /// General times before the first and after the last wall at which
    /// the wall set was checked to be empty.
    pub probe_lo: Rat,
    pub probe_hi: Rat,
    /// First class that violated goodness, with the reason.
    pub offender: Option<(GammaClass, String)>,
}

impl ChargePath {
    /// Standard large volume ray.
    pub fn omega_ray(b: Rat, omega_prime: Rat, z: CRat) -> Result<Self> {
        if !arg_open_upper_left(&z) {
            return Err(Error::BadPath(format!(
                "arg z must lie in (pi/2, pi); got z = {z}"
            )));
        }
        if !omega_prime.is_positive() {
            return Err(Error::BadPath("omega_prime must be positive".into()));
        }
        Ok(ChargePath::OmegaRay { b, omega_prime, z })
    }

    /// Flopped-side ray, `t < 0`.
    pub fn flop_ray(b: Rat, omega_prime: Rat, z: CRat) -> Result<Self> {
        match Self::omega_ray(b, omega_prime, z)? {
            ChargePath::OmegaRay { b, omega_prime, z } => {
                Ok(ChargePath::FlopRay { b, omega_prime, z })
            }
            _ => unreachable!(),
        }
    }

    /// Linear interpolation of the level 0 unit inside the point family
    /// region.  The admissible cone `{re < 0, im >= 0}` is convex, so
    /// checking the endpoints keeps every intermediate charge valid.
    pub fn linear_xi(
        model: &FlopModel,
        p: i8,
        b: Rat,
        omega_prime: Rat,
        z0_start: CRat,
        z0_end: CRat,
        z1: CRat,
    ) -> Result<Self> {
        if !pv_contains(model, p, &b)? {
            return Err(Error::BadPath(format!(
                "B-field {b} * H outside the perversity {p} region"
            )));
        }
        if !omega_prime.is_positive() {
            return Err(Error::BadPath("omega_prime must be positive".into()));
        }
        for (name, value) in [("z0_start", &z0_start), ("z0_end", &z0_end), ("z1", &z1)] {
            if !arg_closed_upper_left(value) {
                return Err(Error::BadPath(format!(
                    "arg {name} must lie in (pi/2, pi]; got {name} = {value}"
                )));
            }
        }
        if z1 == CRat::from_ints(-1, 0) {
            return Err(Error::BadPath("z1 = -1 is excluded".into()));
        }
        Ok(ChargePath::LinearXi {
            p,
            b,
            omega_prime,
            z0_start,
            z0_end,
            z1,
        })
    }

    /// Default path parameters of the scenarios: `b = -1/2`,
    /// `z = exp(3 pi i / 4)` stored as the slope datum `(-1, 1)`,
    /// `omega_prime = 1`.
    pub fn default_omega_ray() -> Self {
        ChargePath::OmegaRay {
            b: rat(-1, 2),
            omega_prime: rat_int(1),
            z: CRat::from_ints(-1, 1),
        }
    }

    /// Default point-family segment: `z0` from `-1` to `-1 + 2i` against
    /// `z1 = -1 + i`, with the single wall at `t = 1/2`.
    pub fn default_linear_xi() -> Self {
        ChargePath::LinearXi {
            p: 0,
            b: rat(-1, 2),
            omega_prime: rat_int(1),
            z0_start: CRat::from_ints(-1, 0),
            z0_end: CRat::from_ints(-1, 2),
            z1: CRat::from_ints(-1, 1),
        }
    }

    /// True when `t` lies in the open interior of the path domain.
    pub fn domain_contains(&self, t: &Rat) -> bool {
        match self {
            ChargePath::OmegaRay { .. } => t.is_positive(),
            ChargePath::FlopRay { .. } => t.is_negative(),
            ChargePath::LinearXi { .. } => t.is_positive() && *t < rat_int(1),
        }
    }

    /// Charge at path time `t`.
    pub fn charge_at(&self, model: &FlopModel, t: &Rat) -> Result<CentralCharge> {
        match self {
            ChargePath::OmegaRay { b, omega_prime, z } => {
                CentralCharge::large_volume(b.clone(), t.clone(), omega_prime.clone(), z.clone())
            }
            ChargePath::FlopRay { b, omega_prime, z } => {
                if !t.is_negative() {
                    return Err(Error::BadPath(format!(
                        "flop ray time t = {t} must be negative"
                    )));
                }
                Ok(CentralCharge::large_volume_raw(
                    b.clone(),
                    t.clone(),
                    omega_prime.clone(),
                    z.clone(),
                ))
            }
            ChargePath::LinearXi {
                p,
                b,
                omega_prime,
                z0_start,
                z0_end,
                z1,
            } => {
                if t.is_negative() || *t > rat_int(1) {
                    return Err(Error::BadPath(format!(
                        "segment time t = {t} outside [0, 1]"
                    )));
                }
                let z0 = &z0_start.scale(&(rat_int(1) - t)) + &z0_end.scale(t);
                CentralCharge::nc_point(
                    model,
                    *p,
                    b.clone(),
                    omega_prime.clone(),
                    z0,
                    z1.clone(),
                )
            }
        }
    }

    /// Level 0 charge along the path as an affine function of `t`:
    /// returns `(A, B)` with `Z_t(v) = A + t * B`.
    fn level0_linear(&self, model: &FlopModel, v: &GammaClass) -> (CRat, CRat) {
        let d = rat_int(model.h_degree(&v.beta));
        match self {
            ChargePath::OmegaRay { b, .. } | ChargePath::FlopRay { b, .. } => (
                CRat::new(rat_int(v.n) - b * &d, Rat::zero()),
                CRat::new(Rat::zero(), -d),
            ),
            ChargePath::LinearXi {
                b,
                z0_start,
                z0_end,
                ..
            } => {
                let c = b * &d - rat_int(v.n);
                (z0_start.scale(&c), (z0_end - z0_start).scale(&c))
            }
        }
    }

    /// Charge of the reference class along the path (constant in `t`).
    fn reference_unit(&self) -> CRat {
        match self {
            ChargePath::OmegaRay { z, .. } | ChargePath::FlopRay { z, .. } => z.clone(),
            ChargePath::LinearXi { z1, .. } => z1.clone(),
        }
    }

    /// The unique path time at which `Z_t(v)` aligns with the reference
    /// ray, or `None` when the ray of `v` never crosses inside the open
    /// domain.  Walls are a ray-level notion: `v` and `-v` solve to the
    /// same time.
    ///
    /// Errors on classes of filtration level other than 0 and on rays
    /// that stay aligned for all `t`.
    pub fn solve_wall_time(&self, model: &FlopModel, v: &GammaClass) -> Result<Option<Rat>> {
        if v.is_zero() {
            return Ok(None);
        }
        if model.filtration_level(v) != 0 {
            return Err(Error::Domain(format!(
                "wall classes must have filtration level 0; got {v:?}"
            )));
        }
        let (a, bb) = self.level0_linear(model, v);
        let reference = self.reference_unit();
        let ca = a.cross(&reference);
        let cb = bb.cross(&reference);
        if cb.is_zero() {
            if !ca.is_zero() {
                return Ok(None);
            }
            if a.is_zero() && bb.is_zero() {
                // The charge vanishes identically on this ray.
                return Ok(None);
            }
            return Err(Error::BadPath(format!(
                "charge of {v:?} stays aligned with the reference for all t"
            )));
        }
        let t_star = -ca / cb;
        if !self.domain_contains(&t_star) {
            return Ok(None);
        }
        let at_wall = &a + &bb.scale(&t_star);
        if at_wall.is_zero() {
            return Ok(None);
        }
        Ok(Some(t_star))
    }

    /// Verifies the two-sided crossing pattern of every wall met by the
    /// box and signs each wall time.
    ///
    /// For each wall member `v` the phases of `Z(v)` and `Z(O)` are
    /// compared at `t* - δ` and `t* + δ`.  Dropping below the reference
    /// after the wall signs the event `+1`; rising above signs it `-1`.
    /// Tangential contact or members disagreeing on the sign make the
    /// path not good; the offending class is reported.
    pub fn is_good_path(&self, model: &FlopModel, n_box: i64, m_box: i64) -> Result<GoodPath> {
        let classes = level0_box(model, n_box, m_box);
        let mut times = BTreeSet::new();
        for v in &classes {
            match self.solve_wall_time(model, v) {
                Ok(Some(t)) => {
                    times.insert(t);
                }
                Ok(None) => {}
                Err(Error::BadPath(reason)) => {
                    return Ok(GoodPath {
                        good: false,
                        events: Vec::new(),
                        delta: None,
                        probe_lo: Rat::zero(),
                        probe_hi: Rat::zero(),
                        offender: Some((v.clone(), reason)),
                    });
                }
                Err(other) => return Err(other),
            }
        }
        let times: Vec<Rat> = times.into_iter().collect();
        let (probe_lo, probe_hi, delta) = self.probe_plan(&times);

        for (label, probe) in [("start", probe_lo.clone()), ("end", probe_hi.clone())] {
            let charge = self.charge_at(model, &probe)?;
            let boundary = wall_set(&charge, model, n_box, m_box);
            if let Some(v) = boundary.first() {
                return Ok(GoodPath {
                    good: false,
                    events: Vec::new(),
                    delta: Some(delta),
                    probe_lo,
                    probe_hi,
                    offender: Some((
                        v.clone(),
                        format!("path {label} probe t = {probe} lies on a wall"),
                    )),
                });
            }
        }

        let mut events = Vec::with_capacity(times.len());
        for t_star in times {
            let members = wall_set(&self.charge_at(model, &t_star)?, model, n_box, m_box);
            debug_assert!(!members.is_empty(), "wall time without members");
            let mut sign: Option<i8> = None;
            for v in &members {
                let eps = match self.crossing_sign(model, v, &t_star, &delta) {
                    Ok(eps) => eps,
                    Err(Error::BadPath(reason)) | Err(Error::Domain(reason)) => {
                        return Ok(GoodPath {
                            good: false,
                            events,
                            delta: Some(delta),
                            probe_lo,
                            probe_hi,
                            offender: Some((v.clone(), reason)),
                        });
                    }
                    Err(other) => return Err(other),
                };
                match sign {
                    None => sign = Some(eps),
                    Some(prev) if prev != eps => {
                        return Ok(GoodPath {
                            good: false,
                            events,
                            delta: Some(delta),
                            probe_lo,
                            probe_hi,
                            offender: Some((
                                v.clone(),
                                format!(
                                    "wall at t = {t_star} mixes crossing directions \
                                     ({prev} vs {eps})"
                                ),
                            )),
                        });
                    }
                    Some(_) => {}
                }
            }
            events.push((t_star, sign.expect("nonempty wall")));
        }
        Ok(GoodPath {
            good: true,
            events,
            delta: Some(delta),
            probe_lo,
            probe_hi,
            offender: None,
        })
    }

    /// General probe times bracketing the walls, and the two-sided
    /// offset `delta`: a quarter of the smallest gap between consecutive
    /// wall times and between the extreme walls and the domain boundary.
    fn probe_plan(&self, times: &[Rat]) -> (Rat, Rat, Rat) {
        let (lo_default, hi_default) = match self {
            ChargePath::OmegaRay { .. } => (rat_int(1), rat_int(2)),
            ChargePath::FlopRay { .. } => (rat_int(-2), rat_int(-1)),
            ChargePath::LinearXi { .. } => (rat(1, 4), rat(3, 4)),
        };
        if times.is_empty() {
            return (lo_default, hi_default, rat(1, 4));
        }
        let first = times.first().unwrap();
        let last = times.last().unwrap();
        let mut gaps: Vec<Rat> = times.windows(2).map(|w| &w[1] - &w[0]).collect();
        let (lo, hi) = match self {
            ChargePath::OmegaRay { .. } => {
                gaps.push(first.clone());
                (first / rat_int(2), last + rat_int(1))
            }
            ChargePath::FlopRay { .. } => {
                gaps.push(-last.clone());
                (first - rat_int(1), last / rat_int(2))
            }
            ChargePath::LinearXi { .. } => {
                gaps.push(first.clone());
                gaps.push(rat_int(1) - last);
                (first / rat_int(2), (last + rat_int(1)) / rat_int(2))
            }
        };
        let min_gap = gaps.iter().min().cloned().unwrap();
        (lo, hi, min_gap / rat_int(4))
    }

    /// Crossing sign of one wall member by exact two-sided phase
    /// comparison.
    fn crossing_sign(
        &self,
        model: &FlopModel,
        v: &GammaClass,
        t_star: &Rat,
        delta: &Rat,
    ) -> Result<i8> {
        let reference = Phase::of(&self.reference_unit())?;
        let (a, bb) = self.level0_linear(model, v);
        let side = |t: Rat| -> Result<Ordering> {
            let value = &a + &bb.scale(&t);
            Ok(Phase::of(&value)?.cmp(&reference))
        };
        let before = side(t_star - delta)?;
        let after = side(t_star + delta)?;
        match (before, after) {
            (Ordering::Greater, Ordering::Less) => Ok(1),
            (Ordering::Less, Ordering::Greater) => Ok(-1),
            _ => Err(Error::BadPath(format!(
                "tangential wall contact of {v:?} at t = {t_star}"
            ))),
        }
    }
}

/// Nonzero level 0 classes `(n, beta, 0)` with `|n| <= n_box` and every
/// `|beta_i| <= m_box`, in lexicographic order.
pub(crate) fn level0_box(model: &FlopModel, n_box: i64, m_box: i64) -> Vec<GammaClass> {
    let mut out = Vec::new();
    let mut beta = model.zero_beta();
    collect_box(model, n_box, m_box, 0, &mut beta, &mut out);
    out
}

fn collect_box(
    model: &FlopModel,
    n_box: i64,
    m_box: i64,
    coord: usize,
    beta: &mut Vec<i64>,
    out: &mut Vec<GammaClass>,
) {
    if coord == model.rank_n1 {
        if model.y_degree(beta) != 0 {
            return;
        }
        for n in -n_box..=n_box {
            let v = GammaClass::curve(n, beta.clone());
            if !v.is_zero() {
                out.push(v);
            }
        }
        return;
    }
    for value in -m_box..=m_box {
        beta[coord] = value;
        collect_box(model, n_box, m_box, coord + 1, beta, out);
    }
    beta[coord] = 0;
}

/// All level 0 classes in the box whose charge is a positive real
/// multiple of the reference charge `Z(0, 0, 1)`.  The test is an exact
/// cross-multiplication, never floating point.
pub fn wall_set(
    charge: &CentralCharge,
    model: &FlopModel,
    n_box: i64,
    m_box: i64,
) -> Vec<GammaClass> {
    let reference = charge.reference(model);
    level0_box(model, n_box, m_box)
        .into_iter()
        .filter(|v| charge.evaluate(model, v).on_positive_ray_of(&reference))
        .collect()
}

/// Empirical support-property constant: the maximum of
/// `norm(v) / |Z(v)|` over box classes compatible with the heart of the
/// charge, with the norm taken in the graded piece of the filtration
/// level of `v`.  Finiteness and stability of this maximum under box
/// growth is the numerical shadow of the support property.
pub fn support_constant(
    charge: &CentralCharge,
    model: &FlopModel,
    n_box: i64,
    m_box: i64,
) -> f64 {
    let norm = |n: i64, beta: &[i64]| -> f64 {
        let mut s = (n * n) as f64;
        for &c in beta {
            s += (c * c) as f64;
        }
        s.sqrt()
    };
    let magnitude = |z: &CRat| rat_to_f64(&z.norm_sq()).sqrt();

    // Level 2: the graded class is the rank alone.
    let mut best = 1.0 / magnitude(&charge.reference(model));

    // Level 1: classes with nonzero degree over the base.
    let mut beta = model.zero_beta();
    let mut betas = Vec::new();
    collect_betas(model.rank_n1, m_box, 0, &mut beta, &mut betas);
    for beta in &betas {
        let y = model.y_degree(beta);
        if y == 0 {
            continue;
        }
        let v = GammaClass::curve(0, beta.clone());
        let value = charge.evaluate(model, &v);
        let ratio = norm(0, beta) / magnitude(&value);
        if ratio > best {
            best = ratio;
        }
    }

    // Level 0: heart classes are -(n, beta) with (n, beta) in the
    // support cone of the family: the effective cone for large volume
    // data, the perverse ideal-sheaf cone for point data.
    let cone = match charge {
        CentralCharge::LargeVolume { .. } => None,
        CentralCharge::NcPoint { p, .. } => Some(SupportKind::PT(*p)),
    };
    for beta in &betas {
        if model.y_degree(beta) != 0 {
            continue;
        }
        for n in -n_box..=n_box {
            if n == 0 && beta.iter().all(|&c| c == 0) {
                continue;
            }
            let admissible = match &cone {
                None => model.is_effective(beta) && (beta.iter().any(|&c| c != 0) || n > 0),
                Some(kind) => kind.contains(model, n, beta),
            };
            if !admissible {
                continue;
            }
            let v = GammaClass::curve(-n, beta.iter().map(|&c| -c).collect());
            let value = charge.evaluate(model, &v);
            if value.is_zero() {
                continue;
            }
            let ratio = norm(n, beta) / magnitude(&value);
            if ratio > best {
                best = ratio;
            }
        }
    }
    best
}

fn collect_betas(rank: usize, m_box: i64, coord: usize, beta: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if coord == rank {
        out.push(beta.clone());
        return;
    }
    for value in -m_box..=m_box {
        beta[coord] = value;
        collect_betas(rank, m_box, coord + 1, beta, out);
    }
    beta[coord] = 0;
}

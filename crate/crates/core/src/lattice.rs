//! The Chern character lattice of a flopping contraction and its cones.
//!
//! A class is a triple `(n, beta, r)`: holomorphic Euler characteristic,
//! curve class in a fixed integral basis of `N_1(X)`, and rank.  The lattice
//! is filtered by rank and by the pushforward of the curve class to the base:
//! level 0 classes are supported on the exceptional fibres, level 1 classes
//! have a nonzero image on the base, level 2 classes have nonzero rank.
//! Central charge evaluation and wall detection read a class through its top
//! nonvanishing level.
//!
//! `FlopModel` carries the intersection data: which basis directions are
//! exceptional, the generators of the effective cone, the pairing with a
//! relatively ample divisor `H`, the pairing that measures the image on the
//! base, and the lower bound `n_min` for the minimal Euler characteristic
//! of a curve in a given class.  The quadratic default `n_min(m) = -2 m^2`
//! is the conifold value.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

/// Lattice class `(n, beta, r) = (ch3, ch2, ch0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaClass {
    pub n: i64,
    pub beta: Vec<i64>,
    pub r: i64,
}

impl GammaClass {
    pub fn new(n: i64, beta: Vec<i64>, r: i64) -> Self {
        GammaClass { n, beta, r }
    }

    /// Rank zero class `(n, beta, 0)`.
    pub fn curve(n: i64, beta: Vec<i64>) -> Self {
        GammaClass::new(n, beta, 0)
    }

    /// Dimension zero class `(n, 0, 0)`.
    pub fn point(n: i64, rank_n1: usize) -> Self {
        GammaClass::new(n, vec![0; rank_n1], 0)
    }

    /// The class `(0, 0, 1)` of the structure sheaf.
    pub fn structure_sheaf(rank_n1: usize) -> Self {
        GammaClass::new(0, vec![0; rank_n1], 1)
    }

    pub fn is_zero(&self) -> bool {
        self.n == 0 && self.r == 0 && self.beta.iter().all(|&b| b == 0)
    }

    pub fn neg(&self) -> Self {
        GammaClass::new(-self.n, self.beta.iter().map(|b| -b).collect(), -self.r)
    }

    pub fn add(&self, other: &GammaClass) -> Self {
        assert_eq!(self.beta.len(), other.beta.len(), "mixed lattice ranks");
        GammaClass::new(
            self.n + other.n,
            self.beta.iter().zip(&other.beta).map(|(a, b)| a + b).collect(),
            self.r + other.r,
        )
    }
}

impl fmt::Display for GammaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:?}, {})", self.n, self.beta, self.r)
    }
}

/// The two curve-lattice involutions induced by a flop.
///
/// `PhiStar` is the flop pushforward: it negates the exceptional coordinates
/// and fixes the rest.  `IPhiStar` composes the pushforward with global
/// negation of the curve class, so it fixes the exceptional coordinates and
/// negates the rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlopMode {
    PhiStar,
    IPhiStar,
}

impl fmt::Display for FlopMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlopMode::PhiStar => write!(f, "phi_star"),
            FlopMode::IPhiStar => write!(f, "i_circ_phi_star"),
        }
    }
}

/// Lower bound table for the Euler characteristic of curves in a class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NMin {
    /// `n_min(beta) = coeff * (H . beta)^2`; the conifold default is `-2`.
    Quadratic(i64),
    /// Explicit table keyed by the curve class.
    ///
    /// Looking up a class missing from the table panics; tables must cover
    /// every effective class they are queried on.
    Table(BTreeMap<Vec<i64>, i64>),
}

/// Intersection data of a flopping contraction.
#[derive(Debug)]
pub struct FlopModel {
    pub name: String,
    pub rank_n1: usize,
    /// Indices of the basis classes contracted by the flop.
    pub exceptional_coords: Vec<usize>,
    /// Generators of the effective cone, as coordinate vectors.
    pub effective_generators: Vec<Vec<i64>>,
    pub euler_char: i64,
    /// Pairing of each basis class with the relatively ample divisor `H`.
    pub h_pairing: Vec<i64>,
    /// Pairing measuring the image of a curve class on the base; zero on
    /// the exceptional directions.
    pub y_pairing: Vec<i64>,
    /// Pairing used by the perverse supports; nonnegative on the effective
    /// generators.
    pub chi_pairing: Vec<i64>,
    /// Classes of the scheme-theoretic fibres over contracted points.
    pub fiber_cycles: Vec<Vec<i64>>,
    pub n_min: NMin,
    /// Positive grading used to terminate effective-cone membership search.
    grading: Vec<i64>,
    effective_cache: Mutex<HashMap<Vec<i64>, bool>>,
}

impl PartialEq for FlopModel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.rank_n1 == other.rank_n1
            && self.exceptional_coords == other.exceptional_coords
            && self.effective_generators == other.effective_generators
            && self.euler_char == other.euler_char
            && self.h_pairing == other.h_pairing
            && self.y_pairing == other.y_pairing
            && self.chi_pairing == other.chi_pairing
            && self.fiber_cycles == other.fiber_cycles
            && self.n_min == other.n_min
    }
}

impl Clone for FlopModel {
    fn clone(&self) -> Self {
        FlopModel {
            name: self.name.clone(),
            rank_n1: self.rank_n1,
            exceptional_coords: self.exceptional_coords.clone(),
            effective_generators: self.effective_generators.clone(),
            euler_char: self.euler_char,
            h_pairing: self.h_pairing.clone(),
            y_pairing: self.y_pairing.clone(),
            chi_pairing: self.chi_pairing.clone(),
            fiber_cycles: self.fiber_cycles.clone(),
            n_min: self.n_min.clone(),
            grading: self.grading.clone(),
            effective_cache: Mutex::new(HashMap::new()),
        }
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    assert_eq!(a.len(), b.len(), "mixed lattice ranks");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl FlopModel {
    /// Validates and assembles a model.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: String,
        rank_n1: usize,
        exceptional_coords: Vec<usize>,
        effective_generators: Vec<Vec<i64>>,
        euler_char: i64,
        h_pairing: Vec<i64>,
        y_pairing: Vec<i64>,
        chi_pairing: Vec<i64>,
        fiber_cycles: Vec<Vec<i64>>,
        n_min: NMin,
    ) -> Result<Self> {
        if rank_n1 == 0 {
            return Err(Error::Config("rank_n1 must be positive".into()));
        }
        for &i in &exceptional_coords {
            if i >= rank_n1 {
                return Err(Error::Config(format!(
                    "exceptional coordinate {i} outside basis of rank {rank_n1}"
                )));
            }
        }
        for v in [&h_pairing, &y_pairing, &chi_pairing] {
            if v.len() != rank_n1 {
                return Err(Error::Config(format!(
                    "pairing vector {v:?} has length {} but rank_n1 = {rank_n1}",
                    v.len()
                )));
            }
        }
        for &i in &exceptional_coords {
            if y_pairing[i] != 0 {
                return Err(Error::Config(format!(
                    "exceptional coordinate {i} must pair to zero with the base"
                )));
            }
        }
        if effective_generators.is_empty() {
            return Err(Error::Config("effective cone needs at least one generator".into()));
        }
        for g in effective_generators.iter().chain(fiber_cycles.iter()) {
            if g.len() != rank_n1 {
                return Err(Error::Config(format!(
                    "cone vector {g:?} has length {} but rank_n1 = {rank_n1}",
                    g.len()
                )));
            }
        }
        let grading: Vec<i64> = h_pairing
            .iter()
            .zip(&y_pairing)
            .map(|(h, y)| h.abs() + y.abs())
            .collect();
        for g in &effective_generators {
            if dot(&grading, g) <= 0 {
                return Err(Error::Config(format!(
                    "effective generator {g:?} is not positively graded by |H| + |Y|"
                )));
            }
            if dot(&chi_pairing, g) < 0 {
                return Err(Error::Config(format!(
                    "effective generator {g:?} pairs negatively with the perverse bound"
                )));
            }
        }
        Ok(FlopModel {
            name,
            rank_n1,
            exceptional_coords,
            effective_generators,
            euler_char,
            h_pairing,
            y_pairing,
            chi_pairing,
            fiber_cycles,
            n_min,
            grading,
            effective_cache: Mutex::new(HashMap::new()),
        })
    }

    /// The resolved conifold: a single exceptional rational curve over a
    /// point, Euler characteristic 2, fibre class equal to the curve class.
    pub fn conifold() -> Self {
        FlopModel::new(
            "conifold".into(),
            1,
            vec![0],
            vec![vec![1]],
            2,
            vec![1],
            vec![0],
            vec![1],
            vec![vec![1]],
            NMin::Quadratic(-2),
        )
        .expect("builtin conifold model is valid")
    }

    /// Looks up a built-in model by name.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "conifold" => Ok(FlopModel::conifold()),
            _ => Err(Error::Config(format!("unknown builtin model '{name}'"))),
        }
    }

    pub fn zero_beta(&self) -> Vec<i64> {
        vec![0; self.rank_n1]
    }

    /// Curve class `m` times the first exceptional basis direction.
    pub fn exceptional_beta(&self, m: i64) -> Vec<i64> {
        let mut beta = self.zero_beta();
        let i = *self
            .exceptional_coords
            .first()
            .expect("model has at least one exceptional coordinate");
        beta[i] = m;
        beta
    }

    /// Degree against the relatively ample divisor.
    pub fn h_degree(&self, beta: &[i64]) -> i64 {
        dot(&self.h_pairing, beta)
    }

    /// Degree of the image on the base; zero exactly for fibre-supported
    /// classes in the models shipped here.
    pub fn y_degree(&self, beta: &[i64]) -> i64 {
        dot(&self.y_pairing, beta)
    }

    /// Pairing entering the perverse support bound.
    pub fn chi_degree(&self, beta: &[i64]) -> i64 {
        dot(&self.chi_pairing, beta)
    }

    /// Filtration level of a class: 2 for nonzero rank, 1 for a curve class
    /// with nonzero image on the base, 0 otherwise.
    pub fn filtration_level(&self, v: &GammaClass) -> u8 {
        if v.r != 0 {
            2
        } else if self.y_degree(&v.beta) != 0 {
            1
        } else {
            0
        }
    }

    /// Membership of `beta` in the nonnegative integer span of the
    /// effective generators.
    pub fn is_effective(&self, beta: &[i64]) -> bool {
        if beta.iter().all(|&b| b == 0) {
            return true;
        }
        if let Some(&hit) = self.effective_cache.lock().unwrap().get(beta) {
            return hit;
        }
        let result = self.effective_search(beta);
        self.effective_cache
            .lock()
            .unwrap()
            .insert(beta.to_vec(), result);
        result
    }

    fn effective_search(&self, beta: &[i64]) -> bool {
        // Depth-first search subtracting generators; the positive grading
        // strictly decreases, so the search terminates.
        if beta.iter().all(|&b| b == 0) {
            return true;
        }
        if dot(&self.grading, beta) <= 0 {
            return false;
        }
        for g in &self.effective_generators {
            let rest: Vec<i64> = beta.iter().zip(g).map(|(b, gi)| b - gi).collect();
            if self.is_effective(&rest) {
                return true;
            }
        }
        false
    }

    /// Partial order on curve classes generated by the effective cone.
    pub fn leq(&self, lo: &[i64], hi: &[i64]) -> bool {
        let diff: Vec<i64> = hi.iter().zip(lo).map(|(h, l)| h - l).collect();
        self.is_effective(&diff)
    }

    /// Minimal Euler characteristic of a one-dimensional subscheme with
    /// class bounded by `beta`; defined for effective `beta`.
    ///
    /// # Panics
    /// Panics when a table-backed model is missing an entry.
    pub fn n_min(&self, beta: &[i64]) -> i64 {
        debug_assert!(self.is_effective(beta), "n_min on non-effective class");
        match &self.n_min {
            NMin::Quadratic(c) => {
                let d = self.h_degree(beta);
                c * d * d
            }
            NMin::Table(table) => *table
                .get(beta)
                .unwrap_or_else(|| panic!("n_min table has no entry for class {beta:?}")),
        }
    }

    /// Applies a flop involution to a rank zero class.
    pub fn flop_pushforward(&self, v: &GammaClass, mode: FlopMode) -> Result<GammaClass> {
        if v.r != 0 {
            return Err(Error::Domain(format!(
                "flop transform is defined on the curve lattice, got rank {}",
                v.r
            )));
        }
        Ok(GammaClass::curve(v.n, self.map_beta(&v.beta, mode)))
    }

    /// The curve-class part of a flop involution.
    pub fn map_beta(&self, beta: &[i64], mode: FlopMode) -> Vec<i64> {
        let mut out = beta.to_vec();
        match mode {
            FlopMode::PhiStar => {
                for &i in &self.exceptional_coords {
                    out[i] = -out[i];
                }
            }
            FlopMode::IPhiStar => {
                for (i, b) in out.iter_mut().enumerate() {
                    if !self.exceptional_coords.contains(&i) {
                        *b = -*b;
                    }
                }
            }
        }
        out
    }

    /// Zeroes the exceptional coordinates, leaving the image on the base.
    pub fn base_part(&self, beta: &[i64]) -> Vec<i64> {
        let mut out = beta.to_vec();
        for &i in &self.exceptional_coords {
            out[i] = 0;
        }
        out
    }
}

/// Cone of lattice keys a series is allowed to populate.
///
/// The standard kinds translate the supports of the curve-counting theories:
/// `TX` is the pair/quotient support (effective fibre classes, nonnegative
/// Euler characteristic), `SX` the rank-one sheaf support (effective classes,
/// Euler characteristic bounded below by `n_min`), and `PT`/`PS` are the
/// perverse analogues where the exceptional coordinates range over all
/// integers subject to the perverse bound with parameter `p` in `{0, -1}`.
/// `PointAxis` is the dimension zero axis common to all of them, `Window`
/// the unconstrained test support with a floor on `n`, and `Image` the
/// pushforward of a support under a flop involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportKind {
    PointAxis,
    TX,
    SX,
    PT(i8),
    PS(i8),
    Window { min_n: i64 },
    Image(FlopMode, Box<SupportKind>),
}

impl SupportKind {
    fn perversity_sign(p: i8) -> Result<i64> {
        match p {
            0 => Ok(1),
            -1 => Ok(-1),
            _ => Err(Error::Config(format!("perversity {p} outside {{0, -1}}"))),
        }
    }

    /// Membership test for the key `(n, beta)` of a rank zero class.
    pub fn contains(&self, model: &FlopModel, n: i64, beta: &[i64]) -> bool {
        match self {
            SupportKind::PointAxis => n >= 0 && beta.iter().all(|&b| b == 0),
            SupportKind::TX => {
                n >= 0 && model.y_degree(beta) == 0 && model.is_effective(beta)
            }
            SupportKind::SX => model.is_effective(beta) && n >= model.n_min(beta),
            SupportKind::PT(p) => {
                let sign = match Self::perversity_sign(*p) {
                    Ok(s) => s,
                    Err(_) => return false,
                };
                n >= 0
                    && model.y_degree(beta) == 0
                    && model.is_effective(&model.base_part(beta))
                    && n + sign * model.chi_degree(beta) >= 0
            }
            SupportKind::PS(p) => {
                let sign = match Self::perversity_sign(*p) {
                    Ok(s) => s,
                    Err(_) => return false,
                };
                let base = model.base_part(beta);
                model.is_effective(&base)
                    && n >= model.n_min(&base)
                    && n + sign * model.chi_degree(beta) >= model.n_min(&base)
            }
            SupportKind::Window { min_n } => n >= *min_n,
            SupportKind::Image(mode, inner) => {
                // The involutions are their own inverses.
                inner.contains(model, n, &model.map_beta(beta, *mode))
            }
        }
    }

    /// Floor on `n` over the working window, used when absorbing `Window`.
    fn window_floor(&self) -> Option<i64> {
        match self {
            SupportKind::PointAxis
            | SupportKind::TX
            | SupportKind::PT(_) => Some(0),
            SupportKind::Window { min_n } => Some(*min_n),
            SupportKind::Image(_, inner) => inner.window_floor(),
            SupportKind::SX | SupportKind::PS(_) => None,
        }
    }

    /// Smallest standard kind containing sums of a member of `a` and a
    /// member of `b`.  Errors when the sum leaves every kind the engine can
    /// guarantee exact arithmetic on.
    pub fn absorb(a: &SupportKind, b: &SupportKind) -> Result<SupportKind> {
        use SupportKind::*;
        if a == b {
            if matches!(a, SX | PS(_)) {
                return Err(Error::Support(format!(
                    "products of two rank-one supports ({a}) leave the support lattice"
                )));
            }
            if let Window { min_n } = a {
                return Ok(Window { min_n: min_n * 2 });
            }
            return Ok(a.clone());
        }
        match (a, b) {
            (PointAxis, k) | (k, PointAxis) => Ok(k.clone()),
            (TX, SX) | (SX, TX) => Ok(SX),
            (TX, PT(p)) | (PT(p), TX) => Ok(PT(*p)),
            (TX, PS(p)) | (PS(p), TX) => Ok(PS(*p)),
            (PT(p), PS(q)) | (PS(q), PT(p)) if p == q => Ok(PS(*p)),
            (Window { min_n }, k) | (k, Window { min_n }) => match k.window_floor() {
                Some(f) => Ok(Window { min_n: min_n + f }),
                None => Err(Error::Support(format!(
                    "cannot absorb {k} into a windowed support"
                ))),
            },
            (Image(m1, i1), Image(m2, i2)) if m1 == m2 => Ok(Image(
                *m1,
                Box::new(SupportKind::absorb(i1, i2)?),
            )),
            // Remaining mixed pairs keep no structural guarantee, but any
            // two kinds with window floors sum inside a windowed support.
            _ => match (a.window_floor(), b.window_floor()) {
                (Some(fa), Some(fb)) => Ok(Window { min_n: fa + fb }),
                _ => Err(Error::Support(format!(
                    "no common support absorbs sums from {a} and {b}"
                ))),
            },
        }
    }

    /// Smallest standard kind containing every listed key, tried from the
    /// most restrictive kind outward.
    pub fn spanning<'k>(
        model: &FlopModel,
        keys: impl IntoIterator<Item = (i64, &'k [i64])> + Clone,
    ) -> Result<SupportKind> {
        let candidates = [
            SupportKind::PointAxis,
            SupportKind::TX,
            SupportKind::PT(0),
            SupportKind::PT(-1),
            SupportKind::SX,
        ];
        for cand in candidates {
            if keys
                .clone()
                .into_iter()
                .all(|(n, beta)| cand.contains(model, n, beta))
            {
                return Ok(cand);
            }
        }
        Err(Error::Support(
            "keys fit no standard support kind".into(),
        ))
    }

    /// Wraps in the image under a flop involution, cancelling a double
    /// application.
    pub fn image(self, mode: FlopMode) -> SupportKind {
        match self {
            SupportKind::Image(m, inner) if m == mode => *inner,
            SupportKind::PointAxis => SupportKind::PointAxis,
            other => SupportKind::Image(mode, Box::new(other)),
        }
    }
}

impl fmt::Display for SupportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SupportKind::PointAxis => write!(f, "point_axis"),
            SupportKind::TX => write!(f, "T_X"),
            SupportKind::SX => write!(f, "S_X"),
            SupportKind::PT(p) => write!(f, "pT(p={p})"),
            SupportKind::PS(p) => write!(f, "pS(p={p})"),
            SupportKind::Window { min_n } => write!(f, "window(n>={min_n})"),
            SupportKind::Image(mode, inner) => write!(f, "{mode}({inner})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conifold() -> FlopModel {
        FlopModel::conifold()
    }

    /// Two-curve toy model: coordinate 0 exceptional, coordinate 1 mapping
    /// to the base.
    fn rank2() -> FlopModel {
        FlopModel::new(
            "rank2-toy".into(),
            2,
            vec![0],
            vec![vec![1, 0], vec![0, 1]],
            4,
            vec![1, 1],
            vec![0, 1],
            vec![1, 0],
            vec![vec![1, 0]],
            NMin::Quadratic(-2),
        )
        .unwrap()
    }

    #[test]
    fn filtration_levels() {
        let m = conifold();
        assert_eq!(m.filtration_level(&GammaClass::structure_sheaf(1)), 2);
        assert_eq!(m.filtration_level(&GammaClass::curve(3, vec![5])), 0);
        let m2 = rank2();
        assert_eq!(m2.filtration_level(&GammaClass::curve(0, vec![2, 0])), 0);
        assert_eq!(m2.filtration_level(&GammaClass::curve(0, vec![2, 1])), 1);
        assert_eq!(m2.filtration_level(&GammaClass::new(0, vec![2, 1], -1)), 2);
    }

    #[test]
    fn filtration_level_is_stable_under_level_zero_shifts() {
        let m = rank2();
        for n in -3..=3i64 {
            for b0 in -3..=3i64 {
                for b1 in -3..=3i64 {
                    for r in -2..=2i64 {
                        let v = GammaClass::new(n, vec![b0, b1], r);
                        for wn in -3..=3i64 {
                            for wb in -3..=3i64 {
                                let w = GammaClass::curve(wn, vec![wb, 0]);
                                assert_eq!(m.filtration_level(&w), 0);
                                assert_eq!(
                                    m.filtration_level(&v.add(&w)),
                                    m.filtration_level(&v)
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn effectivity_and_leq() {
        let m = conifold();
        assert!(m.is_effective(&[0]));
        assert!(m.is_effective(&[7]));
        assert!(!m.is_effective(&[-1]));
        assert!(m.leq(&[2], &[5]));
        assert!(!m.leq(&[5], &[2]));
        let m2 = rank2();
        assert!(m2.is_effective(&[3, 2]));
        assert!(!m2.is_effective(&[3, -1]));
    }

    #[test]
    fn n_min_quadratic_and_table() {
        let m = conifold();
        assert_eq!(m.n_min(&[0]), 0);
        assert_eq!(m.n_min(&[1]), -2);
        assert_eq!(m.n_min(&[3]), -18);
        let mut table = BTreeMap::new();
        table.insert(vec![0], 0);
        table.insert(vec![1], -2);
        table.insert(vec![2], -4);
        let mt = FlopModel::new(
            "conifold-linear-table".into(),
            1,
            vec![0],
            vec![vec![1]],
            2,
            vec![1],
            vec![0],
            vec![1],
            vec![vec![1]],
            NMin::Table(table),
        )
        .unwrap();
        assert_eq!(mt.n_min(&[2]), -4);
        // The linear table used by the worked example: (n, beta) = (-1, 1)
        // is in S_X because n_min(1) = -2 <= -1.
        assert!(SupportKind::SX.contains(&mt, -1, &[1]));
    }

    #[test]
    fn flop_maps_are_involutions() {
        let m2 = rank2();
        let v = GammaClass::curve(3, vec![2, -5]);
        for mode in [FlopMode::PhiStar, FlopMode::IPhiStar] {
            let w = m2.flop_pushforward(&v, mode).unwrap();
            assert_eq!(m2.flop_pushforward(&w, mode).unwrap(), v);
        }
        let phi = m2.flop_pushforward(&v, FlopMode::PhiStar).unwrap();
        assert_eq!(phi.beta, vec![-2, -5]);
        let iphi = m2.flop_pushforward(&v, FlopMode::IPhiStar).unwrap();
        assert_eq!(iphi.beta, vec![2, 5]);
        assert!(m2
            .flop_pushforward(&GammaClass::structure_sheaf(2), FlopMode::PhiStar)
            .is_err());
    }

    #[test]
    fn i_phi_star_fixes_conifold_curve_classes() {
        let m = conifold();
        let v = GammaClass::curve(2, vec![1]);
        let w = m.flop_pushforward(&v, FlopMode::IPhiStar).unwrap();
        assert_eq!(w, v);
        let p = m.flop_pushforward(&v, FlopMode::PhiStar).unwrap();
        assert_eq!(p.beta, vec![-1]);
    }

    #[test]
    fn support_membership() {
        let m = conifold();
        assert!(SupportKind::TX.contains(&m, 0, &[0]));
        assert!(SupportKind::TX.contains(&m, 4, &[2]));
        assert!(!SupportKind::TX.contains(&m, -1, &[2]));
        assert!(!SupportKind::TX.contains(&m, 4, &[-1]));
        assert!(SupportKind::SX.contains(&m, -2, &[1]));
        assert!(SupportKind::SX.contains(&m, -8, &[2]));
        assert!(!SupportKind::SX.contains(&m, -9, &[2]));
        // Perverse support: exceptional coordinate of either sign, bounded
        // by the perverse pairing.
        assert!(SupportKind::PT(0).contains(&m, 3, &[-3]));
        assert!(!SupportKind::PT(0).contains(&m, 3, &[-4]));
        assert!(SupportKind::PT(-1).contains(&m, 3, &[-4]));
        assert!(!SupportKind::PT(-1).contains(&m, 3, &[4]));
        assert!(!SupportKind::PT(0).contains(&m, -1, &[2]));
    }

    #[test]
    fn support_absorption_rules() {
        use SupportKind::*;
        let ab = |a: &SupportKind, b: &SupportKind| SupportKind::absorb(a, b);
        assert_eq!(ab(&TX, &TX).unwrap(), TX);
        assert_eq!(ab(&PointAxis, &SX).unwrap(), SX);
        assert_eq!(ab(&TX, &SX).unwrap(), SX);
        assert_eq!(ab(&TX, &PT(0)).unwrap(), PT(0));
        assert_eq!(ab(&PT(0), &PS(0)).unwrap(), PS(0));
        assert!(ab(&SX, &SX).is_err());
        // Mixed perversities keep only the window floor.
        assert_eq!(ab(&PT(0), &PT(-1)).unwrap(), Window { min_n: 0 });
        assert!(ab(&SX, &PT(0)).is_err());
    }

    #[test]
    fn sums_stay_in_absorbed_support() {
        // Spot-check the absorption table semantically.
        let m = conifold();
        let kinds = [
            SupportKind::PointAxis,
            SupportKind::TX,
            SupportKind::SX,
            SupportKind::PT(0),
        ];
        for a in &kinds {
            for b in &kinds {
                let Ok(c) = SupportKind::absorb(a, b) else {
                    continue;
                };
                for n1 in -4..=4i64 {
                    for m1 in -4..=4i64 {
                        if !a.contains(&m, n1, &[m1]) {
                            continue;
                        }
                        for n2 in -4..=4i64 {
                            for m2 in -4..=4i64 {
                                if b.contains(&m, n2, &[m2]) {
                                    assert!(
                                        c.contains(&m, n1 + n2, &[m1 + m2]),
                                        "({n1},{m1}) in {a} plus ({n2},{m2}) in {b} escapes {c}"
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn finite_decomposition_matches_brute_force() {
        // Count ordered splittings p = y + z inside S_X two ways: with the
        // bounds implied by the cone shape, and by brute force over a large
        // window.  Counts must agree and be stable when the window doubles.
        let m = conifold();
        let split_count = |window: i64, pn: i64, pm: i64| -> usize {
            let mut count = 0;
            for m1 in -window..=window {
                for n1 in -window..=window {
                    let (n2, m2) = (pn - n1, pm - m1);
                    if SupportKind::SX.contains(&m, n1, &[m1])
                        && SupportKind::SX.contains(&m, n2, &[m2])
                    {
                        count += 1;
                    }
                }
            }
            count
        };
        for pn in -4..=4i64 {
            for pm in -4..=4i64 {
                let direct = {
                    // Inside S_X both parts have 0 <= m_i <= pm and
                    // n_min(m_i) <= n_i <= pn - n_min(pm - m_i).
                    let mut count = 0;
                    for m1 in 0..=pm.max(0) {
                        let m2 = pm - m1;
                        if m2 < 0 {
                            continue;
                        }
                        let lo = m.n_min(&[m1]);
                        let hi = pn - m.n_min(&[m2]);
                        if hi >= lo {
                            count += (hi - lo + 1) as usize;
                        }
                    }
                    count
                };
                let wide = split_count(60, pn, pm);
                let wider = split_count(120, pn, pm);
                assert_eq!(direct, wide, "splittings of ({pn},{pm})");
                assert_eq!(wide, wider, "window growth changed splittings of ({pn},{pm})");
            }
        }
    }

    #[test]
    fn image_support_round_trip() {
        let m = conifold();
        let img = SupportKind::TX.image(FlopMode::PhiStar);
        assert!(img.contains(&m, 3, &[-2]));
        assert!(!img.contains(&m, 3, &[2]));
        assert_eq!(img.image(FlopMode::PhiStar), SupportKind::TX);
    }

    #[test]
    fn spanning_picks_the_tightest_kind() {
        let m = conifold();
        let keys1 = vec![(1i64, vec![0i64]), (2, vec![0])];
        let s1 = SupportKind::spanning(&m, keys1.iter().map(|(n, b)| (*n, b.as_slice()))).unwrap();
        assert_eq!(s1, SupportKind::PointAxis);
        let keys2 = vec![(1i64, vec![1i64]), (2, vec![0])];
        let s2 = SupportKind::spanning(&m, keys2.iter().map(|(n, b)| (*n, b.as_slice()))).unwrap();
        assert_eq!(s2, SupportKind::TX);
        let keys3 = vec![(1i64, vec![-1i64])];
        let s3 = SupportKind::spanning(&m, keys3.iter().map(|(n, b)| (*n, b.as_slice()))).unwrap();
        assert_eq!(s3, SupportKind::PT(0));
        let keys4 = vec![(-1i64, vec![1i64])];
        let s4 = SupportKind::spanning(&m, keys4.iter().map(|(n, b)| (*n, b.as_slice()))).unwrap();
        assert_eq!(s4, SupportKind::SX);
    }
}

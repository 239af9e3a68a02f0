//! Crossing engine: walls met along a charge path, the ordered product of
//! exponential factors over their rays, and the named verification
//! scenarios.
//!
//! All factors are exponentials of single monomials in a commutative
//! coefficient ring, so factors on one wall commute exactly; order across
//! walls follows the path orientation.

use crate::charges::{wall_set, ChargePath};
use crate::error::{Error, Result};
use crate::exact::{rat, rat_int, CRat, Rat};
use crate::lattice::{FlopMode, FlopModel, GammaClass, SupportKind};
use crate::oracles;
use crate::series::{ConeSeries, Mismatch, Truncation};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Assigns the rational invariant `N_{n, beta}` to rank zero classes.
///
/// Values must satisfy the evenness symmetries
/// `N(n, beta) = N(-n, beta) = N(n, -beta)`.
pub trait NProvider {
    fn value(&self, model: &FlopModel, n: i64, beta: &[i64]) -> Result<Rat>;
}

/// Product-formula invariants of the conifold family.  `hatted` switches to
/// the Euler-characteristic weighting consumed by the unsigned crossing.
#[derive(Clone, Copy, Debug)]
pub struct ConifoldProvider {
    pub chi: i64,
    pub hatted: bool,
}

impl NProvider for ConifoldProvider {
    fn value(&self, model: &FlopModel, n: i64, beta: &[i64]) -> Result<Rat> {
        if beta.len() != 1 {
            return Err(Error::Config(format!(
                "conifold invariants need a rank one curve lattice, got rank {}",
                beta.len()
            )));
        }
        let m = beta[0];
        if n == 0 && m == 0 {
            return Err(Error::UndefinedInvariant(
                "invariant undefined on the zero class".into(),
            ));
        }
        if model.rank_n1 != 1 {
            return Err(Error::Config(format!(
                "conifold invariants serve rank one models, got rank {}",
                model.rank_n1
            )));
        }
        Ok(match (m, self.hatted) {
            (0, false) => oracles::point_n(self.chi, n.abs()),
            (0, true) => oracles::point_n_hat(self.chi, n.abs()),
            (_, false) => oracles::conifold_n(n, m),
            (_, true) => oracles::conifold_n_hat(n, m),
        })
    }
}

/// Finite table of invariant values with the evenness symmetries built in.
/// Lookups outside the table are errors, not zeros.
#[derive(Clone, Debug, Default)]
pub struct TableN {
    values: BTreeMap<(i64, Vec<i64>), Rat>,
}

impl TableN {
    pub fn new() -> Self {
        TableN::default()
    }

    fn canon(n: i64, beta: &[i64]) -> (i64, Vec<i64>) {
        let flip = beta.iter().find(|&&c| c != 0).map_or(false, |&c| c < 0);
        let beta = if flip {
            beta.iter().map(|&c| -c).collect()
        } else {
            beta.to_vec()
        };
        (n.abs(), beta)
    }

    /// Stores the value on the whole symmetry orbit of `(n, beta)`.
    pub fn insert(&mut self, n: i64, beta: &[i64], value: Rat) {
        self.values.insert(Self::canon(n, beta), value);
    }
}

impl NProvider for TableN {
    fn value(&self, _model: &FlopModel, n: i64, beta: &[i64]) -> Result<Rat> {
        self.values
            .get(&Self::canon(n, beta))
            .cloned()
            .ok_or_else(|| {
                Error::UndefinedInvariant(format!(
                    "no tabulated invariant at ({n}, {beta:?})"
                ))
            })
    }
}

/// One wall met by a path: its time, a primitive ray in the product
/// convention (negated wall members), the in-box multiples of that ray, and
/// the crossing sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallEvent {
    pub t_star: Rat,
    pub primitive: GammaClass,
    pub multiples: Vec<GammaClass>,
    pub epsilon: i8,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Primitive vector on the ray of a nonzero rank zero class.
fn primitive_of(v: &GammaClass) -> GammaClass {
    let mut g = v.n.abs();
    for &c in &v.beta {
        g = gcd(g, c);
    }
    assert!(g > 0, "zero class has no ray");
    GammaClass::curve(v.n / g, v.beta.iter().map(|c| c / g).collect())
}

/// Multiplier of a member against the primitive vector of its ray.
fn ray_multiplier(member: &GammaClass, prim: &GammaClass) -> i64 {
    if prim.n != 0 {
        member.n / prim.n
    } else {
        let i = prim
            .beta
            .iter()
            .position(|&c| c != 0)
            .expect("primitive class is nonzero");
        member.beta[i] / prim.beta[i]
    }
}

/// All walls met by the path inside the box, one event per `(t*, ray)`,
/// sorted along the path orientation with ties broken by the primitive.
pub fn detect_walls(
    path: &ChargePath,
    model: &Arc<FlopModel>,
    n_box: i64,
    m_box: i64,
) -> Result<Vec<WallEvent>> {
    let probe = path.is_good_path(model, n_box, m_box)?;
    if !probe.good {
        let (cls, why) = probe
            .offender
            .unwrap_or_else(|| (GammaClass::curve(0, model.zero_beta()), "unspecified".into()));
        return Err(Error::BadPath(format!(
            "path fails the exchange test at class ({}, {:?}): {why}",
            cls.n, cls.beta
        )));
    }
    let mut events = Vec::new();
    for (t_star, eps) in &probe.events {
        let charge = path.charge_at(model, t_star)?;
        let members = wall_set(&charge, model, n_box, m_box);
        let mut rays: BTreeMap<GammaClass, Vec<(i64, GammaClass)>> = BTreeMap::new();
        for v in members {
            let prim = primitive_of(&v);
            let k = ray_multiplier(&v, &prim);
            rays.entry(prim).or_default().push((k, v));
        }
        for (prim, mut mults) in rays {
            mults.sort_by_key(|(k, _)| *k);
            events.push(WallEvent {
                t_star: t_star.clone(),
                primitive: prim.neg(),
                multiples: mults.into_iter().map(|(_, v)| v.neg()).collect(),
                epsilon: *eps,
            });
        }
    }
    events.sort_by(|a, b| a.t_star.cmp(&b.t_star).then(a.primitive.cmp(&b.primitive)));
    Ok(events)
}

fn factor_support(model: &Arc<FlopModel>, n: i64, beta: &[i64]) -> SupportKind {
    SupportKind::spanning(model, [(n, beta)])
        .unwrap_or(SupportKind::Window { min_n: n.min(0) })
}

fn apply_crossing_with(
    start: &ConeSeries,
    events: &[WallEvent],
    provider: &dyn NProvider,
    signed: bool,
) -> Result<ConeSeries> {
    let model = start.model().clone();
    let trunc = start.truncation().clone();
    let mut acc = start.clone();
    for event in events {
        for idx in &event.multiples {
            if idx.n == 0 {
                // The exponent carries an explicit factor n, so degree zero
                // classes contribute exp(0) = 1 whatever N assigns them.
                continue;
            }
            let nv = provider.value(&model, idx.n, &idx.beta)?;
            if nv.is_zero() {
                continue;
            }
            if idx.n < 0 {
                return Err(Error::Domain(format!(
                    "nontrivial factor at negative point degree ({}, {:?})",
                    idx.n, idx.beta
                )));
            }
            let support = factor_support(&model, idx.n, &idx.beta);
            let factor = if signed {
                ConeSeries::exp_factor(
                    &model,
                    support,
                    trunc.clone(),
                    idx.n,
                    &idx.beta,
                    &nv,
                    event.epsilon,
                )?
            } else {
                ConeSeries::exp_factor_unsigned(
                    &model,
                    support,
                    trunc.clone(),
                    idx.n,
                    &idx.beta,
                    &nv,
                    event.epsilon,
                )?
            };
            acc = acc.mul(&factor)?;
        }
    }
    Ok(acc)
}

/// Multiplies `start` by `exp((-1)^(n-1) n N x^n y^beta)^epsilon` over every
/// multiple of every event, in event order.  Classes with undefined `N`
/// error; vanishing `N` and degree zero classes contribute nothing.
pub fn apply_crossing(
    start: &ConeSeries,
    events: &[WallEvent],
    provider: &dyn NProvider,
) -> Result<ConeSeries> {
    apply_crossing_with(start, events, provider, true)
}

/// Euler-characteristic weighted crossing: factors `exp(n N x^n y^beta)^epsilon`.
pub fn apply_crossing_unsigned(
    start: &ConeSeries,
    events: &[WallEvent],
    provider: &dyn NProvider,
) -> Result<ConeSeries> {
    apply_crossing_with(start, events, provider, false)
}

/// Named verification scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    PtFromNc,
    NcdtProduct,
    FlopSymmetry,
    GlobalQuotient,
    EulerHat,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::PtFromNc,
        Scenario::NcdtProduct,
        Scenario::FlopSymmetry,
        Scenario::GlobalQuotient,
        Scenario::EulerHat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::PtFromNc => "pt_from_nc",
            Scenario::NcdtProduct => "ncdt_product",
            Scenario::FlopSymmetry => "flop_symmetry",
            Scenario::GlobalQuotient => "global_quotient",
            Scenario::EulerHat => "euler_hat",
        }
    }

    pub fn parse(name: &str) -> Result<Scenario> {
        Scenario::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown scenario '{name}'; expected one of {}",
                    Scenario::ALL.map(|s| s.name()).join(", ")
                ))
            })
    }
}

/// Outcome of one scenario: the computed series, pass/fail against the
/// closed form, and the first differing coefficient on failure.
#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub scenario: String,
    pub box_n: i64,
    pub box_m: i64,
    pub passed: bool,
    pub first_mismatch: Option<Mismatch>,
    pub series: ConeSeries,
    pub notes: Vec<String>,
}

impl ScenarioReport {
    fn new(which: Scenario, trunc: &Truncation, series: ConeSeries) -> Self {
        ScenarioReport {
            scenario: which.name().into(),
            box_n: trunc.n_max(),
            box_m: trunc.m_max(),
            passed: true,
            first_mismatch: None,
            series,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, label: &str, left: &ConeSeries, right: &ConeSeries) {
        match left.first_mismatch(right) {
            None => self.notes.push(format!("{label}: ok")),
            Some(mm) => {
                self.notes.push(format!("{label}: first mismatch at ({}, {:?})", mm.n, mm.beta));
                if self.passed {
                    self.first_mismatch = Some(mm);
                    self.passed = false;
                }
            }
        }
    }
}

/// Runs a scenario with the default B-field `b = -1/2`.
pub fn scenario(
    which: Scenario,
    model: &Arc<FlopModel>,
    trunc: Truncation,
) -> Result<ScenarioReport> {
    scenario_with_b(which, model, trunc, &rat(-1, 2))
}

/// Runs a scenario at an explicit B-field `b H`; the output series must not
/// depend on the choice within the allowed region.
pub fn scenario_with_b(
    which: Scenario,
    model: &Arc<FlopModel>,
    trunc: Truncation,
    b: &Rat,
) -> Result<ScenarioReport> {
    match which {
        Scenario::PtFromNc => pt_from_nc(model, trunc, b, false),
        Scenario::NcdtProduct => ncdt_product(model, trunc, b, false),
        Scenario::FlopSymmetry => flop_symmetry(model, trunc, false),
        Scenario::GlobalQuotient => global_quotient(model, trunc),
        Scenario::EulerHat => euler_hat(model, trunc, b),
    }
}

/// Crossing along the omega ray from the normalized start `1`; the product
/// over all walls must equal the stable pairs closed form.
fn pt_from_nc(
    model: &Arc<FlopModel>,
    trunc: Truncation,
    b: &Rat,
    hatted: bool,
) -> Result<ScenarioReport> {
    let path = ChargePath::omega_ray(b.clone(), rat_int(1), CRat::from_ints(-1, 1))?;
    let events = detect_walls(&path, model, trunc.n_max(), trunc.m_max())?;
    let start = ConeSeries::one(model, SupportKind::PointAxis, trunc.clone());
    let provider = ConifoldProvider { chi: model.euler_char, hatted };
    let crossed = if hatted {
        apply_crossing_unsigned(&start, &events, &provider)?
    } else {
        apply_crossing(&start, &events, &provider)?
    };
    let expected = ConeSeries::pt_closed_form(model, trunc.clone(), hatted, 1)?;
    let which = if hatted { Scenario::EulerHat } else { Scenario::PtFromNc };
    let mut report = ScenarioReport::new(which, &trunc, crossed.clone());
    report.scenario = Scenario::PtFromNc.name().into();
    report.check("omega ray product vs stable pairs closed form", &crossed, &expected);
    Ok(report)
}

/// Crossing the single point-family wall; the simultaneous product over the
/// half-space of rays must equal the closed form with both curve directions.
fn ncdt_product(
    model: &Arc<FlopModel>,
    trunc: Truncation,
    b: &Rat,
    hatted: bool,
) -> Result<ScenarioReport> {
    let path = ChargePath::linear_xi(
        model,
        0,
        b.clone(),
        rat_int(1),
        CRat::from_ints(-1, 0),
        CRat::from_ints(-1, 2),
        CRat::from_ints(-1, 1),
    )?;
    // Mixed-sign curve factors fold back into the box from curve degrees up
    // to n_max, so the detection box is widened accordingly.
    let m_box = trunc.n_max().max(trunc.m_max());
    let events = detect_walls(&path, model, trunc.n_max(), m_box)?;
    let start = ConeSeries::one(model, SupportKind::PointAxis, trunc.clone());
    let provider = ConifoldProvider { chi: model.euler_char, hatted };
    let crossed = if hatted {
        apply_crossing_unsigned(&start, &events, &provider)?
    } else {
        apply_crossing(&start, &events, &provider)?
    };
    let expected = ConeSeries::ncdt_closed_form(model, trunc.clone(), hatted)?;
    let mut report = ScenarioReport::new(Scenario::NcdtProduct, &trunc, crossed.clone());
    report.check("point family product vs two-sided closed form", &crossed, &expected);
    Ok(report)
}

/// The flop involution composed with the sign of the point degree fixes the
/// relative series; the stable pairs factor alone flops to the inverse
/// curve direction.
fn flop_symmetry(
    model: &Arc<FlopModel>,
    trunc: Truncation,
    hatted: bool,
) -> Result<ScenarioReport> {
    let dt = ConeSeries::dt_closed_form(model, trunc.clone(), hatted)?;
    let flopped = dt.substitute(FlopMode::IPhiStar)?;
    let mut report = ScenarioReport::new(Scenario::FlopSymmetry, &trunc, flopped.clone());
    report.check("relative series fixed under the composed involution", &flopped, &dt);

    let pt_plus = ConeSeries::pt_closed_form(model, trunc.clone(), hatted, 1)?;
    let pt_minus = ConeSeries::pt_closed_form(model, trunc.clone(), hatted, -1)?;
    let pt_flopped = pt_plus.substitute(FlopMode::PhiStar)?;
    report.check(
        "stable pairs factor flops to the inverse direction",
        &pt_flopped,
        &pt_minus,
    );

    let ncdt = ConeSeries::ncdt_closed_form(model, trunc.clone(), hatted)?;
    let glued = dt.mul(&pt_flopped)?;
    report.check(
        "point family series factors through both flop sides",
        &glued,
        &ncdt,
    );
    Ok(report)
}

/// Quotient identity in the local model: both sides are the unit series
/// because every class here is fibre-supported.
fn global_quotient(model: &Arc<FlopModel>, trunc: Truncation) -> Result<ScenarioReport> {
    let dt = ConeSeries::dt_closed_form(model, trunc.clone(), false)?;
    let lhs = dt.divide(&dt)?;
    let ncdt = ConeSeries::ncdt_closed_form(model, trunc.clone(), false)?;
    let rhs = ncdt.divide(&ncdt)?;
    let mut report = ScenarioReport::new(Scenario::GlobalQuotient, &trunc, lhs.clone());
    report.check("quotient of the absolute by the relative series", &lhs, &rhs);
    if !lhs.is_one() {
        report.passed = false;
        report.notes.push("left quotient is not the unit series".into());
    }
    report.notes.push(
        "trivial in the local model: all classes are fibre-supported, both quotients are 1"
            .into(),
    );
    Ok(report)
}

/// Euler-characteristic weighted repeats of the crossing scenarios plus the
/// stone-count pin of the weighted coefficients.
fn euler_hat(model: &Arc<FlopModel>, trunc: Truncation, b: &Rat) -> Result<ScenarioReport> {
    let pt = pt_from_nc(model, trunc.clone(), b, true)?;
    let nc = ncdt_product(model, trunc.clone(), b, true)?;
    let flop = flop_symmetry(model, trunc.clone(), true)?;
    let mut report = ScenarioReport::new(Scenario::EulerHat, &trunc, nc.series.clone());
    for sub in [&pt, &nc, &flop] {
        for note in &sub.notes {
            report.notes.push(format!("weighted {}: {note}", sub.scenario));
        }
        if !sub.passed && report.passed {
            report.passed = false;
            report.first_mismatch = sub.first_mismatch.clone();
        }
    }

    // Stone-count ground truth for the weighted coefficients.  Buckets whose
    // image lies outside the box are skipped below, so the total is capped by
    // the enumeration ceiling alone.
    let total = 10.min(oracles::PYRAMID_STONE_LIMIT);
    let buckets = oracles::count_pyramid_partitions(total)?;
    let mut pinned = 0usize;
    let mut stones_ok = true;
    for w in 0..=total {
        for bl in 0..=(total - w) {
            let (n, m) = (w as i64, bl as i64 - w as i64);
            if n > trunc.n_max() || m.abs() > trunc.m_max() {
                continue;
            }
            let count = buckets.get(&(w, bl)).copied().unwrap_or(0);
            let coeff = nc.series.coefficient(n, &model.exceptional_beta(m))?;
            if coeff != rat_int(count as i64) {
                stones_ok = false;
                if report.passed {
                    report.passed = false;
                    report.first_mismatch = Some(Mismatch {
                        n,
                        beta: model.exceptional_beta(m),
                        left: coeff.clone(),
                        right: rat_int(count as i64),
                    });
                }
            }
            pinned += 1;
        }
    }
    report.notes.push(if stones_ok {
        format!("stone counts pin {pinned} weighted coefficients up to total {total}: ok")
    } else {
        "stone counts disagree with the weighted coefficients".into()
    });
    Ok(report)
}

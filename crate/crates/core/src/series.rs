//! Truncated formal series on a cone of lattice keys.
//!
//! A `ConeSeries` is a finite sum of terms `c * x^n y^beta` with exact
//! rational coefficients, keyed by `(n, beta)` inside a support cone and a
//! truncation box.  All arithmetic is exact on the box: the working window
//! keeps a margin of `m_work - m_max` in each curve coordinate so that
//! products of box terms with support slope at most one per unit of `n`
//! never lose contributions that would re-enter the box.
//!
//! Provided operations:
//! - ring arithmetic (`add`, `sub`, `mul`, `pow`), inverses and `log` of
//!   series with constant term one,
//! - exponential factors `exp(eps * (-1)^(n-1) * n * N * x^n y^beta)` used
//!   by the wall-crossing product, and the unsigned variant,
//! - Euler-type products, the MacMahon series, and the closed forms of the
//!   conifold theories,
//! - flop substitution, re-indexing a series along a curve-lattice
//!   involution.

use crate::error::{Error, Result};
use crate::exact::{rat_int, sign_pow, Rat};
use crate::lattice::{FlopMode, FlopModel, SupportKind};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Truncation box: keys satisfy `n <= n_max` and `|beta_i| <= m_max` for a
/// user-visible query, while the internal working window extends the curve
/// bound to `m_work` so that box coefficients of products stay exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    n_max: i64,
    m_max: i64,
    m_work: i64,
}

impl Truncation {
    /// Box with the default working margin `m_work = m_max + n_max`,
    /// sufficient for supports whose curve degree grows at most by one per
    /// unit of `n` (every built-in series).
    pub fn new(n_max: i64, m_max: i64) -> Self {
        assert!(n_max >= 0 && m_max >= 0, "truncation bounds must be nonnegative");
        Truncation {
            n_max,
            m_max,
            m_work: m_max + n_max,
        }
    }

    /// Box with an explicit working margin, for series whose curve degree
    /// grows faster than one per unit of `n`.
    pub fn with_margin(n_max: i64, m_max: i64, m_work: i64) -> Self {
        assert!(n_max >= 0 && m_max >= 0, "truncation bounds must be nonnegative");
        assert!(m_work >= m_max, "working margin smaller than the box");
        Truncation { n_max, m_max, m_work }
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn m_max(&self) -> i64 {
        self.m_max
    }

    pub fn m_work(&self) -> i64 {
        self.m_work
    }
}

/// Key of a series term.
pub type Key = (i64, Vec<i64>);

/// A coefficient mismatch found when comparing two series on their box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub n: i64,
    pub beta: Vec<i64>,
    pub left: Rat,
    pub right: Rat,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at (n, beta) = ({}, {:?}): {} vs {}",
            self.n, self.beta, self.left, self.right
        )
    }
}

/// Truncated series supported on a cone.
#[derive(Clone, Debug)]
pub struct ConeSeries {
    model: Arc<FlopModel>,
    support: SupportKind,
    trunc: Truncation,
    coeffs: BTreeMap<Key, Rat>,
}

impl ConeSeries {
    /// The zero series.
    pub fn zero(model: &Arc<FlopModel>, support: SupportKind, trunc: Truncation) -> Self {
        ConeSeries {
            model: Arc::clone(model),
            support,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant series one.
    pub fn one(model: &Arc<FlopModel>, support: SupportKind, trunc: Truncation) -> Self {
        let mut s = ConeSeries::zero(model, support, trunc);
        s.coeffs.insert((0, s.model.zero_beta()), Rat::one());
        s
    }

    /// Builds a series from explicit terms; every key must lie in the
    /// support and the working window.
    pub fn from_terms(
        model: &Arc<FlopModel>,
        support: SupportKind,
        trunc: Truncation,
        terms: impl IntoIterator<Item = (i64, Vec<i64>, Rat)>,
    ) -> Result<Self> {
        let mut s = ConeSeries::zero(model, support, trunc);
        for (n, beta, c) in terms {
            if !s.in_window(n, &beta) {
                return Err(Error::Range(format!(
                    "term ({n}, {beta:?}) outside the working window"
                )));
            }
            if !s.support.contains(&s.model, n, &beta) {
                return Err(Error::Support(format!(
                    "term ({n}, {beta:?}) outside support {}",
                    s.support
                )));
            }
            let slot = s.coeffs.entry((n, beta)).or_insert_with(Rat::zero);
            *slot += c;
        }
        s.coeffs.retain(|_, v| !v.is_zero());
        Ok(s)
    }

    pub fn model(&self) -> &Arc<FlopModel> {
        &self.model
    }

    pub fn support(&self) -> &SupportKind {
        &self.support
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    fn in_window(&self, n: i64, beta: &[i64]) -> bool {
        n <= self.trunc.n_max && beta.iter().all(|b| b.abs() <= self.trunc.m_work)
    }

    fn in_box(&self, n: i64, beta: &[i64]) -> bool {
        n <= self.trunc.n_max && beta.iter().all(|b| b.abs() <= self.trunc.m_max)
    }

    fn compatible(&self, other: &ConeSeries) -> Result<()> {
        if *self.model != *other.model {
            return Err(Error::Config("series over different models".into()));
        }
        if self.trunc != other.trunc {
            return Err(Error::Config("series with different truncation boxes".into()));
        }
        Ok(())
    }

    /// Replaces the support by a larger one; every stored key must fit.
    pub fn with_support(mut self, support: SupportKind) -> Result<Self> {
        for (n, beta) in self.coeffs.keys() {
            if !support.contains(&self.model, *n, beta) {
                return Err(Error::Support(format!(
                    "key ({n}, {beta:?}) outside support {support}"
                )));
            }
        }
        self.support = support;
        Ok(self)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1
            && self
                .coeffs
                .get(&(0, self.model.zero_beta()))
                .is_some_and(|c| c.is_one())
    }

    /// Exact coefficient of `x^n y^beta`.
    ///
    /// Absent keys inside the box are known zeros; keys outside the box are
    /// unknown and produce a range error.
    pub fn coefficient(&self, n: i64, beta: &[i64]) -> Result<Rat> {
        if !self.in_box(n, beta) {
            return Err(Error::Range(format!(
                "({n}, {beta:?}) outside the truncation box (n <= {}, |beta| <= {})",
                self.trunc.n_max, self.trunc.m_max
            )));
        }
        Ok(self
            .coeffs
            .get(&(n, beta.to_vec()))
            .cloned()
            .unwrap_or_else(Rat::zero))
    }

    /// Terms inside the user box, sorted by `(n, beta)`.
    pub fn box_terms(&self) -> Vec<(i64, Vec<i64>, Rat)> {
        self.coeffs
            .iter()
            .filter(|((n, beta), _)| self.in_box(*n, beta))
            .map(|((n, beta), c)| (*n, beta.clone(), c.clone()))
            .collect()
    }

    /// First coefficient difference on the box, or `None` when equal.
    pub fn first_mismatch(&self, other: &ConeSeries) -> Option<Mismatch> {
        debug_assert!(
            *self.model == *other.model && self.trunc == other.trunc,
            "comparing series over different models or boxes"
        );
        let mut keys: Vec<&Key> = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .filter(|(n, beta)| self.in_box(*n, beta))
            .collect();
        keys.sort();
        keys.dedup();
        for (n, beta) in keys {
            let l = self.coeffs.get(&(*n, beta.clone())).cloned().unwrap_or_else(Rat::zero);
            let r = other.coeffs.get(&(*n, beta.clone())).cloned().unwrap_or_else(Rat::zero);
            if l != r {
                return Some(Mismatch {
                    n: *n,
                    beta: beta.clone(),
                    left: l,
                    right: r,
                });
            }
        }
        None
    }

    /// Equality of all box coefficients.
    pub fn eq_on_box(&self, other: &ConeSeries) -> bool {
        self.first_mismatch(other).is_none()
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> Self {
        let mut out = self.clone();
        if s.is_zero() {
            out.coeffs.clear();
            return out;
        }
        for c in out.coeffs.values_mut() {
            *c *= s;
        }
        out
    }

    pub fn add(&self, other: &ConeSeries) -> Result<Self> {
        self.compatible(other)?;
        let support = SupportKind::absorb(&self.support, &other.support)?;
        let mut coeffs = self.coeffs.clone();
        for (k, v) in &other.coeffs {
            let slot = coeffs.entry(k.clone()).or_insert_with(Rat::zero);
            *slot += v;
        }
        coeffs.retain(|_, v| !v.is_zero());
        Ok(ConeSeries {
            model: Arc::clone(&self.model),
            support,
            trunc: self.trunc.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &ConeSeries) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Cauchy product, exact on the box.
    pub fn mul(&self, other: &ConeSeries) -> Result<Self> {
        self.compatible(other)?;
        let support = SupportKind::absorb(&self.support, &other.support)?;
        let mut coeffs: BTreeMap<Key, Rat> = BTreeMap::new();
        for ((n1, b1), c1) in &self.coeffs {
            // Keys are ordered by n first, so once the x-degree overflows
            // the box no later key of `other` can contribute.
            for ((n2, b2), c2) in &other.coeffs {
                let n = n1 + n2;
                if n > self.trunc.n_max {
                    break;
                }
                let beta: Vec<i64> = b1.iter().zip(b2).map(|(a, b)| a + b).collect();
                if beta.iter().any(|b| b.abs() > self.trunc.m_work) {
                    continue;
                }
                let slot = coeffs.entry((n, beta)).or_insert_with(Rat::zero);
                *slot += c1 * c2;
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        let out = ConeSeries {
            model: Arc::clone(&self.model),
            support,
            trunc: self.trunc.clone(),
            coeffs,
        };
        debug_assert!(
            out.coeffs
                .keys()
                .all(|(n, beta)| out.support.contains(&out.model, *n, beta)),
            "product escaped its absorbed support"
        );
        Ok(out)
    }

    pub fn pow(&self, k: u64) -> Result<Self> {
        let mut acc = ConeSeries::one(&self.model, self.support.clone(), self.trunc.clone());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `self^chi` for integer `chi`, inverting first when `chi < 0`.
    pub fn pow_signed(&self, chi: i64) -> Result<Self> {
        if chi >= 0 {
            self.pow(chi as u64)
        } else {
            self.inverse()?.pow((-chi) as u64)
        }
    }

    fn unit_constant_gap(&self) -> Result<ConeSeries> {
        let one_key = (0, self.model.zero_beta());
        match self.coeffs.get(&one_key) {
            Some(c) if c.is_one() => {}
            other => {
                return Err(Error::Domain(format!(
                    "series has constant term {} but the operation needs 1",
                    other.cloned().unwrap_or_else(Rat::zero)
                )))
            }
        }
        let mut gap = self.clone();
        gap.coeffs.remove(&one_key);
        Ok(gap)
    }

    /// Upper bound on how many powers of an augmentation term can stay
    /// inside the working window: the window is finite in every coordinate
    /// once the support floor is accounted for, so some power of the
    /// augmentation term must leave it.
    fn nilpotence_cap(&self) -> usize {
        let n_cells = self.trunc.n_max.max(0) as usize + 2;
        let m_cells = 2 * self.trunc.m_work.max(0) as usize + 2;
        let mut cells = n_cells;
        for _ in 0..self.model.rank_n1 {
            cells = cells.saturating_mul(m_cells);
        }
        // Supports with a curve-dependent floor on n admit keys below zero;
        // double the cell count to cover that range as well.
        cells.saturating_mul(2).saturating_add(2)
    }

    /// Multiplicative inverse of a series with constant term one.
    pub fn inverse(&self) -> Result<Self> {
        let u = self.unit_constant_gap()?;
        let mut acc = ConeSeries::one(&self.model, self.support.clone(), self.trunc.clone());
        let mut power = acc.clone();
        let minus_u = u.neg();
        let cap = self.nilpotence_cap();
        for step in 0.. {
            power = power.mul(&minus_u)?;
            if power.is_zero() {
                break;
            }
            assert!(
                step < cap,
                "augmentation term fails to vanish; support lacks finite decompositions"
            );
            acc = acc.add(&power)?;
        }
        Ok(acc)
    }

    /// `self / other`; the divisor needs constant term one.
    pub fn divide(&self, other: &ConeSeries) -> Result<Self> {
        self.mul(&other.inverse()?)
    }

    /// Logarithm of a series with constant term one.
    pub fn log(&self) -> Result<Self> {
        let u = self.unit_constant_gap()?;
        let mut acc = ConeSeries::zero(&self.model, self.support.clone(), self.trunc.clone());
        let mut power = ConeSeries::one(&self.model, self.support.clone(), self.trunc.clone());
        let cap = self.nilpotence_cap();
        for j in 1.. {
            power = power.mul(&u)?;
            if power.is_zero() {
                break;
            }
            assert!(
                (j as usize) < cap,
                "augmentation term fails to vanish; support lacks finite decompositions"
            );
            let coeff = sign_pow(j + 1) / rat_int(j);
            acc = acc.add(&power.scale(&coeff))?;
        }
        Ok(acc)
    }

    /// `exp(coeff * x^n y^beta)` truncated to the window; needs `n >= 1`.
    pub fn exp_monomial(
        model: &Arc<FlopModel>,
        support: SupportKind,
        trunc: Truncation,
        coeff: &Rat,
        n: i64,
        beta: &[i64],
    ) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain(format!(
                "exponential factors need positive x-degree, got n = {n}"
            )));
        }
        if !support.contains(model, n, beta) {
            return Err(Error::Support(format!(
                "monomial ({n}, {beta:?}) outside support {support}"
            )));
        }
        let mut s = ConeSeries::one(model, support, trunc);
        if coeff.is_zero() {
            return Ok(s);
        }
        let mut c_pow = Rat::one();
        let mut factorial = Rat::one();
        for k in 1.. {
            let kn = k * n;
            let kbeta: Vec<i64> = beta.iter().map(|b| b * k).collect();
            if !s.in_window(kn, &kbeta) {
                break;
            }
            c_pow *= coeff;
            factorial *= rat_int(k);
            s.coeffs.insert((kn, kbeta), &c_pow / &factorial);
        }
        Ok(s)
    }

    /// Wall-crossing factor `exp(eps * (-1)^(n-1) * n * N * x^n y^beta)`.
    pub fn exp_factor(
        model: &Arc<FlopModel>,
        support: SupportKind,
        trunc: Truncation,
        n: i64,
        beta: &[i64],
        n_value: &Rat,
        eps: i8,
    ) -> Result<Self> {
        if !(eps == 1 || eps == -1) {
            return Err(Error::Config(format!("crossing sign {eps} outside {{+1, -1}}")));
        }
        let coeff = sign_pow(n + 1) * rat_int(n) * n_value * rat_int(eps as i64);
        Self::exp_monomial(model, support, trunc, &coeff, n, beta)
    }

    /// Euler-characteristic weighted factor `exp(eps * n * N * x^n y^beta)`.
    pub fn exp_factor_unsigned(
        model: &Arc<FlopModel>,
        support: SupportKind,
        trunc: Truncation,
        n: i64,
        beta: &[i64],
        n_value: &Rat,
        eps: i8,
    ) -> Result<Self> {
        if !(eps == 1 || eps == -1) {
            return Err(Error::Config(format!("crossing sign {eps} outside {{+1, -1}}")));
        }
        let coeff = rat_int(n) * n_value * rat_int(eps as i64);
        Self::exp_monomial(model, support, trunc, &coeff, n, beta)
    }

    /// `prod_{k=1..k_max} (1 + c(k) x^k y^(y_exp))^(exp_sign * k)` in the
    /// first exceptional curve variable.
    fn product_factors(
        model: &Arc<FlopModel>,
        trunc: Truncation,
        k_max: i64,
        exp_sign: i8,
        y_exp: i64,
        coeff_of_k: impl Fn(i64) -> Rat,
    ) -> Result<Self> {
        if k_max < trunc.n_max {
            return Err(Error::Config(format!(
                "product truncated at k_max = {k_max} does not saturate the box n <= {}",
                trunc.n_max
            )));
        }
        if !(exp_sign == 1 || exp_sign == -1) {
            return Err(Error::Config(format!(
                "product exponent sign {exp_sign} outside {{+1, -1}}"
            )));
        }
        // Candidate monomials for the support: powers of each factor term.
        let mut monomials: Vec<Key> = Vec::new();
        for k in 1..=trunc.n_max.max(1) {
            let mut j = 1;
            while j * k <= trunc.n_max {
                monomials.push((j * k, model.exceptional_beta(j * y_exp)));
                j += 1;
            }
        }
        if monomials.is_empty() {
            monomials.push((1, model.exceptional_beta(y_exp)));
        }
        let support = SupportKind::spanning(
            model,
            monomials.iter().map(|(n, beta)| (*n, beta.as_slice())),
        )?;
        let mut acc = ConeSeries::one(model, support.clone(), trunc.clone());
        for k in 1..=k_max {
            let beta = model.exceptional_beta(y_exp);
            if !acc.in_window(k, &beta) {
                break;
            }
            let c = coeff_of_k(k);
            if c.is_zero() {
                continue;
            }
            let factor = ConeSeries::from_terms(
                model,
                support.clone(),
                trunc.clone(),
                [
                    (0, model.zero_beta(), Rat::one()),
                    (k, beta, c),
                ],
            )?;
            let factor_pow = if exp_sign == 1 {
                factor.pow(k as u64)?
            } else {
                factor.inverse()?.pow(k as u64)?
            };
            acc = acc.mul(&factor_pow)?;
        }
        Ok(acc)
    }

    /// Sign of the series variable in an Euler-type product.
    ///
    /// `prod_{k=1..k_max} (1 - (sign x)^k y^m)^(exp_sign * k)`.
    pub fn euler_product(
        model: &Arc<FlopModel>,
        trunc: Truncation,
        k_max: i64,
        x_sign: XSign,
        y_exp: i64,
        exp_sign: i8,
    ) -> Result<Self> {
        Self::product_factors(model, trunc, k_max, exp_sign, y_exp, |k| match x_sign {
            XSign::Plus => -Rat::one(),
            XSign::Minus => -sign_pow(k),
        })
    }

    /// MacMahon series `M(-x)^chi = prod (1 - (-x)^k)^(-k * chi)`; negative
    /// `chi` inverts.
    pub fn macmahon(model: &Arc<FlopModel>, trunc: Truncation, chi: i64) -> Result<Self> {
        let base = Self::euler_product(
            model,
            trunc.clone(),
            trunc.n_max.max(1),
            XSign::Minus,
            0,
            -1,
        )?;
        base.pow_signed(chi)
    }

    /// Unsigned MacMahon series `M(x)^chi`.
    pub fn macmahon_unsigned(model: &Arc<FlopModel>, trunc: Truncation, chi: i64) -> Result<Self> {
        let base = Self::euler_product(
            model,
            trunc.clone(),
            trunc.n_max.max(1),
            XSign::Plus,
            0,
            -1,
        )?;
        base.pow_signed(chi)
    }

    /// Stable pairs closed form `prod_k (1 - (-x)^k y^(y_dir))^k`, or the
    /// Euler-characteristic version `prod_k (1 + x^k y^(y_dir))^k`.
    pub fn pt_closed_form(
        model: &Arc<FlopModel>,
        trunc: Truncation,
        hatted: bool,
        y_dir: i64,
    ) -> Result<Self> {
        let k_max = trunc.n_max.max(1);
        if hatted {
            Self::product_factors(model, trunc, k_max, 1, y_dir, |_| Rat::one())
        } else {
            Self::euler_product(model, trunc, k_max, XSign::Minus, y_dir, 1)
        }
    }

    /// Relative closed form: MacMahon to the Euler characteristic times the
    /// stable pairs product.
    pub fn dt_closed_form(model: &Arc<FlopModel>, trunc: Truncation, hatted: bool) -> Result<Self> {
        let mac = if hatted {
            Self::macmahon_unsigned(model, trunc.clone(), model.euler_char)?
        } else {
            Self::macmahon(model, trunc.clone(), model.euler_char)?
        };
        mac.mul(&Self::pt_closed_form(model, trunc, hatted, 1)?)
    }

    /// Closed form of the non-commutative theory at the conifold point:
    /// MacMahon squared times both one-variable products.
    pub fn ncdt_closed_form(
        model: &Arc<FlopModel>,
        trunc: Truncation,
        hatted: bool,
    ) -> Result<Self> {
        let dt = Self::dt_closed_form(model, trunc.clone(), hatted)?;
        dt.mul(&Self::pt_closed_form(model, trunc, hatted, -1)?)
    }

    /// Re-indexes the series along a flop involution of the curve lattice.
    ///
    /// The working window is symmetric in each curve coordinate, so the
    /// re-indexing is a bijection on stored keys and loses nothing.  The
    /// result carries the tightest standard support spanning the mapped
    /// keys, so it multiplies with ordinary series; when no standard kind
    /// fits, it keeps the image of the original support.
    pub fn substitute(&self, mode: FlopMode) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for ((n, beta), c) in &self.coeffs {
            let image = self.model.map_beta(beta, mode);
            coeffs.insert((*n, image), c.clone());
        }
        let support = SupportKind::spanning(
            &self.model,
            coeffs.keys().map(|(n, beta)| (*n, beta.as_slice())),
        )
        .unwrap_or_else(|_| self.support.clone().image(mode));
        Ok(ConeSeries {
            model: Arc::clone(&self.model),
            support,
            trunc: self.trunc.clone(),
            coeffs,
        })
    }
}

/// Sign placed on the series variable in Euler-type products.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XSign {
    Plus,
    Minus,
}

impl fmt::Display for ConeSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((n, beta), c) in self.coeffs.iter().take(12) {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{c} x^{n} y^{beta:?}")?;
            first = false;
        }
        if self.coeffs.len() > 12 {
            write!(f, " + ...")?;
        }
        Ok(())
    }
}

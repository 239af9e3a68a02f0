//! Exact scalar arithmetic.
//!
//! Everything the engine computes is exact: coefficients are arbitrary
//! precision rationals, central charge values are Gaussian rationals, and
//! phase comparisons are decided by sign tests on cross products instead of
//! floating point.  Floats appear only in diagnostics (`rat_to_f64`,
//! `Phase::to_f64`).

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Arbitrary precision rational number.
pub type Rat = BigRational;

/// Builds the exact rational `num / den`.
///
/// # Panics
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "rational with zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the exact integer rational `n`.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Approximate value, for diagnostics only.
pub fn rat_to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Gaussian rational: a complex number with exact rational real and
/// imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CRat {
    pub re: Rat,
    pub im: Rat,
}

impl CRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        CRat { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        CRat::new(rat_int(re), rat_int(im))
    }

    pub fn zero() -> Self {
        CRat::new(Rat::zero(), Rat::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Multiplication by a rational scalar.
    pub fn scale(&self, s: &Rat) -> Self {
        CRat::new(&self.re * s, &self.im * s)
    }

    /// `Re(self) * Im(other) - Im(self) * Re(other)`.
    ///
    /// Zero exactly when the two values are parallel over the reals.
    pub fn cross(&self, other: &CRat) -> Rat {
        &self.re * &other.im - &self.im * &other.re
    }

    /// Euclidean inner product with `other`.
    pub fn dot(&self, other: &CRat) -> Rat {
        &self.re * &other.re + &self.im * &other.im
    }

    /// True when `self` lies on the open ray through `other`, i.e.
    /// `self = c * other` with `c > 0`.
    pub fn on_positive_ray_of(&self, other: &CRat) -> bool {
        !self.is_zero() && self.cross(other).is_zero() && self.dot(other).is_positive()
    }

    /// Squared modulus.
    pub fn norm_sq(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl Add for &CRat {
    type Output = CRat;
    fn add(self, other: &CRat) -> CRat {
        CRat::new(&self.re + &other.re, &self.im + &other.im)
    }
}

impl Sub for &CRat {
    type Output = CRat;
    fn sub(self, other: &CRat) -> CRat {
        CRat::new(&self.re - &other.re, &self.im - &other.im)
    }
}

impl Mul for &CRat {
    type Output = CRat;
    fn mul(self, other: &CRat) -> CRat {
        CRat::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

/// Phase of a nonzero Gaussian rational in the closed upper half plane,
/// measured in half turns: a value `phi` in `(0, 1]` with the number equal
/// to `|z| * exp(i * pi * phi)`.
///
/// The representation stores the cotangent of the angle, so equality and
/// ordering are exact.  Values on the positive real axis (`phi = 0`) and in
/// the open lower half plane are outside the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Phase {
    /// `0 < phi < 1`; the field is `cot(pi * phi)`, strictly decreasing
    /// in `phi`.
    Interior(Rat),
    /// Negative real axis, `phi = 1`.
    HalfTurn,
}

impl Phase {
    /// Phase of `z`.
    ///
    /// Errors when `z` is zero, on the positive real axis, or in the open
    /// lower half plane.
    pub fn of(z: &CRat) -> Result<Phase> {
        if z.is_zero() {
            return Err(Error::Domain("phase of zero central charge".into()));
        }
        if z.im.is_positive() {
            return Ok(Phase::Interior(&z.re / &z.im));
        }
        if z.im.is_zero() && z.re.is_negative() {
            return Ok(Phase::HalfTurn);
        }
        Err(Error::Domain(format!(
            "value {} outside the closed upper half plane slit at the positive real axis",
            z
        )))
    }

    /// The phase `k/4` for `k` in `1..=4`, i.e. the rays at angles
    /// `pi/4`, `pi/2`, `3 pi/4`, `pi`.
    ///
    /// # Panics
    /// Panics when `k` is outside `1..=4`.
    pub fn from_quarters(k: u8) -> Phase {
        match k {
            1 => Phase::Interior(rat_int(1)),
            2 => Phase::Interior(Rat::zero()),
            3 => Phase::Interior(rat_int(-1)),
            4 => Phase::HalfTurn,
            _ => panic!("quarter-turn index {k} outside 1..=4"),
        }
    }

    /// Approximate value in `(0, 1]`, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        match self {
            Phase::Interior(cot) => {
                let c = rat_to_f64(cot);
                // Angle of the point (cot, 1), which lies in the open
                // upper half plane.
                f64::atan2(1.0, c) / std::f64::consts::PI
            }
            Phase::HalfTurn => 1.0,
        }
    }
}

impl PartialOrd for Phase {
    fn partial_cmp(&self, other: &Phase) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Phase {
    fn cmp(&self, other: &Phase) -> Ordering {
        match (self, other) {
            (Phase::HalfTurn, Phase::HalfTurn) => Ordering::Equal,
            (Phase::HalfTurn, Phase::Interior(_)) => Ordering::Greater,
            (Phase::Interior(_), Phase::HalfTurn) => Ordering::Less,
            // phi is strictly decreasing in the cotangent.
            (Phase::Interior(a), Phase::Interior(b)) => b.cmp(a),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::HalfTurn => write!(f, "phi = 1"),
            Phase::Interior(_) => write!(f, "phi = {:.6}", self.to_f64()),
        }
    }
}

/// `(-1)^k` as a rational, for integer `k` of either sign.
pub fn sign_pow(k: i64) -> Rat {
    if k.rem_euclid(2) == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_builders() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(-3, -6), rat(1, 2));
        assert!(rat(0, 5).is_zero());
    }

    #[test]
    fn cross_and_ray_tests() {
        let z = CRat::from_ints(-1, 1);
        let w = CRat::from_ints(-3, 3);
        assert!(w.on_positive_ray_of(&z));
        assert!(!(-&w).on_positive_ray_of(&z));
        assert!(!CRat::zero().on_positive_ray_of(&z));
        assert_eq!(z.cross(&w), Rat::zero());
        assert_eq!(CRat::from_ints(1, 0).cross(&CRat::from_ints(0, 1)), rat_int(1));
    }

    #[test]
    fn phase_of_axis_values() {
        assert_eq!(Phase::of(&CRat::from_ints(-1, 0)).unwrap(), Phase::from_quarters(4));
        assert_eq!(Phase::of(&CRat::from_ints(0, 1)).unwrap(), Phase::from_quarters(2));
        assert_eq!(Phase::of(&CRat::from_ints(-1, 1)).unwrap(), Phase::from_quarters(3));
        assert_eq!(Phase::of(&CRat::from_ints(2, 2)).unwrap(), Phase::from_quarters(1));
        assert!(Phase::of(&CRat::zero()).is_err());
        assert!(Phase::of(&CRat::from_ints(1, 0)).is_err());
        assert!(Phase::of(&CRat::from_ints(0, -1)).is_err());
    }

    #[test]
    fn phase_ordering_is_angle_ordering() {
        let p14 = Phase::from_quarters(1);
        let p12 = Phase::from_quarters(2);
        let p34 = Phase::from_quarters(3);
        let p1 = Phase::from_quarters(4);
        assert!(p14 < p12 && p12 < p34 && p34 < p1);
        // A ray just above the real axis has a huge cotangent and a tiny phase.
        let low = Phase::of(&CRat::from_ints(1000, 1)).unwrap();
        assert!(low < p14);
        let high = Phase::of(&CRat::from_ints(-1000, 1)).unwrap();
        assert!(p34 < high && high < p1);
    }

    #[test]
    fn phase_to_f64_matches_quarters() {
        assert!((Phase::from_quarters(3).to_f64() - 0.75).abs() < 1e-12);
        assert_eq!(Phase::from_quarters(4).to_f64(), 1.0);
    }
}

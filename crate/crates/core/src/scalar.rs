//! Scalar rings and fields used as coefficients.
//!
//! Two field backends are provided: exact arbitrary-precision rationals and
//! `f64`. Both implement [`Field`]; operations are generic over it, so a
//! rational form can never be combined with a float form by accident. The
//! weaker [`Ring`] trait is also implemented by polynomial and closed-form
//! coefficient fields on a patch, which lets the same exterior-algebra code
//! run on pointwise values and on fields.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Which scalar backend a value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational => f.write_str("rational"),
            Backend::Float => f.write_str("float"),
        }
    }
}

/// Commutative ring with unit. Division is optional via [`Ring::inverse`].
pub trait Ring:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Structural zero test. Exact for rationals and polynomials; for
    /// closed-form numeric fields only constant zero is detected.
    fn is_zero(&self) -> bool;
    fn from_i64(n: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    /// Multiplicative inverse when it exists inside the ring.
    fn inverse(&self) -> Option<Self>;

    fn scale_i64(&self, n: i64) -> Self {
        self.clone() * Self::from_i64(n)
    }
}

/// A ring in which every nonzero element is invertible, with enough
/// structure to decide signs, ranks and square roots.
pub trait Field: Ring + Div<Output = Self> {
    const BACKEND: Backend;

    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    /// Sign of the value; zero means exactly zero (rational) or
    /// `|x| <= tol` (float).
    fn sign_tol(&self, tol: f64) -> Ordering;
    /// Square root of a nonnegative value. Rationals return `None` unless
    /// the value is a perfect square.
    fn sqrt(&self) -> Option<Self>;
    /// Approximate equality used by float checks; exact for rationals.
    fn close_to(&self, other: &Self, tol: f64) -> bool;

    fn fourth_root(&self) -> Option<Self> {
        self.sqrt().and_then(|s| s.sqrt())
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Formats a rational as `"p"` or `"p/q"`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn bigint_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl Ring for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(n: i64) -> Self {
        rational_int(n)
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

impl Field for Rational {
    const BACKEND: Backend = Backend::Rational;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn sign_tol(&self, _tol: f64) -> Ordering {
        self.cmp(&<Rational as Zero>::zero())
    }
    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = bigint_sqrt_exact(self.numer())?;
        let d = bigint_sqrt_exact(self.denom())?;
        Some(Rational::new(n, d))
    }
    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_rational(q: &Rational) -> Self {
        Field::to_f64(q)
    }
    fn inverse(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
}

impl Field for f64 {
    const BACKEND: Backend = Backend::Float;

    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sign_tol(&self, tol: f64) -> Ordering {
        if f64::abs(*self) <= tol {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        f64::abs(self - other) <= tol * (1.0 + f64::abs(*self).max(f64::abs(*other)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6"), Some(rational(1, 2)));
        assert_eq!(parse_rational("-7"), Some(rational_int(-7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&rational(-4, 6)), "-2/3");
        assert_eq!(format_rational(&rational(8, 4)), "2");
    }

    #[test]
    fn exact_roots() {
        assert_eq!(Field::sqrt(&rational(9, 4)), Some(rational(3, 2)));
        assert_eq!(Field::sqrt(&rational(2, 1)), None);
        assert_eq!(Field::sqrt(&rational(-1, 1)), None);
        assert_eq!(rational(81, 16).fourth_root(), Some(rational(3, 2)));
    }

    #[test]
    fn float_sign_tolerance() {
        assert_eq!(1e-12f64.sign_tol(1e-9), Ordering::Equal);
        assert_eq!((-1e-3f64).sign_tol(1e-9), Ordering::Less);
    }
}

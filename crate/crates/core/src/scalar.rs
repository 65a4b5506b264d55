//! Scalar abstraction shared by oracles, random variables and potentials.
//!
//! Exact rationals are the reference scalar: every identity the crate checks
//! holds with zero slack over [`BigRational`]. Floating scalars run the same
//! algorithms with rounding, so only the slackened contracts apply to them.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Numeric type usable as a probability, expectation or potential value.
pub trait Scalar:
    Clone + PartialOrd + Debug + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    /// Converts an exact rational, rounding if `Self` is inexact.
    fn from_rational(r: &BigRational) -> Self;

    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: u64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `2^-k`.
    fn pow2_neg(k: u32) -> Self {
        Self::from_rational(&BigRational::new(BigInt::one(), BigInt::one() << k as usize))
    }

    /// Integer `k` as a scalar.
    fn from_count(k: u64) -> Self {
        Self::from_u64(k).expect("every u64 is representable")
    }

    /// Nearest `f64`; used only for transcendental bounds and display.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a transcendental bound computed in `f64` (exactly, for rationals).
    fn from_f64_bound(x: f64) -> Self {
        Self::from_f64(x).expect("bound must be finite")
    }

    /// Canonical text form: `"p/q"` for rationals, decimal otherwise.
    fn to_text(&self) -> String;

    /// Maximum of two values under the partial order (left on ties).
    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_text(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_rational(r: &BigRational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }
}

/// Parses `"p/q"`, `"p"` or a decimal such as `"0.125"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_abs = int.trim_start_matches('-');
        let digits = format!("{int_abs}{frac}");
        let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let den = num_traits::pow(BigInt::from(10u32), frac.len());
        let r = BigRational::new(num, den);
        return Some(if neg { -r } else { r });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// `"p/q"` text of an exact rational.
pub fn rational_text(r: &BigRational) -> String {
    r.to_text()
}

/// Sum of absolute values, the norm used for supports and coefficient vectors.
pub fn l1_norm<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, v| acc + v.abs())
}

/// Exact `base^exp` for a nonnegative exponent.
pub fn powi<T: Scalar>(base: &T, exp: u32) -> T {
    let mut out = T::one();
    for _ in 0..exp {
        out = out * base.clone();
    }
    out
}

//! Scalar types used for masses and thresholds.
//!
//! Everything that compares a mass against a threshold is generic over
//! [`Scalar`]. Certificates are produced with [`crate::Rational`], where every
//! comparison is exact; `f64` is supported for quick exploratory sweeps.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, One, Signed, Zero};

/// Number type a mass can take values in.
pub trait Scalar:
    Num + Clone + PartialOrd + Debug + Display + FromStr + Send + Sync + 'static
{
    /// The value `numer / denom`. `denom` must be nonzero.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// True when comparisons in this type are exact.
    const EXACT: bool;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    /// `2^e` for a possibly negative exponent.
    fn pow2(e: i32) -> Self {
        let two = Self::from_ratio(2, 1);
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc * two.clone();
        }
        if e < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }

    /// Integer power.
    fn powi(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }

    /// Smallest of two values, by reference.
    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Parse the textual form used by the graph file and certificates
    /// (`3/4`, `7`, or a decimal for inexact types).
    fn parse_text(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }

    /// Approximate value, for reporting only.
    fn approx(&self) -> f64;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn pow2(e: i32) -> Self {
        let p = BigInt::one() << e.unsigned_abs();
        if e < 0 {
            BigRational::new(BigInt::one(), p)
        } else {
            BigRational::from_integer(p)
        }
    }

    fn approx(&self) -> f64 {
        ratio_to_f64(self)
    }
}

impl Scalar for Ratio<i64> {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }

    fn approx(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn parse_text(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => Some(n.trim().parse::<f64>().ok()? / d.trim().parse::<f64>().ok()?),
            None => s.parse().ok(),
        }
    }

    fn approx(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f32 / denom as f32
    }

    fn parse_text(s: &str) -> Option<Self> {
        f64::parse_text(s).map(|v| v as f32)
    }

    fn approx(&self) -> f64 {
        *self as f64
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    // Shift both parts down to at most 60 significant bits before dividing.
    let shrink = |x: &BigInt| -> (f64, i64) {
        let bits = x.bits() as i64;
        let shift = (bits - 60).max(0);
        let small: BigInt = x.abs() >> shift as usize;
        let v: f64 = small.to_string().parse().unwrap_or(f64::NAN);
        (if x.is_negative() { -v } else { v }, shift)
    };
    if r.is_zero() {
        return 0.0;
    }
    let (n, sn) = shrink(r.numer());
    let (d, sd) = shrink(r.denom());
    n / d * 2f64.powi((sn - sd) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_matches_repeated_doubling() {
        assert_eq!(BigRational::pow2(10), BigRational::from_ratio(1024, 1));
        assert_eq!(BigRational::pow2(-3), BigRational::from_ratio(1, 8));
        assert_eq!(<Ratio<i64> as Scalar>::pow2(-3), Ratio::new(1, 8));
        assert_eq!(f64::pow2(-1), 0.5);
    }

    #[test]
    fn rational_text_round_trip() {
        let q = BigRational::parse_text("6/8").unwrap();
        assert_eq!(q, BigRational::from_ratio(3, 4));
        assert_eq!(q.to_string(), "3/4");
        assert_eq!(f64::parse_text("1/4"), Some(0.25));
    }

    #[test]
    fn approx_of_huge_rational() {
        let tiny = BigRational::pow2(-200);
        let a = tiny.approx();
        assert!((a / 2f64.powi(-200) - 1.0).abs() < 1e-12);
        assert!((BigRational::from_ratio(-1, 3).approx() + 1.0 / 3.0).abs() < 1e-15);
    }
}

//! Numeric scalar abstraction.
//!
//! Everything in this crate is generic over [`Scalar`]. Exact rationals have
//! zero tolerance, so every comparison below is an exact comparison for them;
//! floating point types compare up to a small absolute tolerance.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// A field element usable as a probability or utility.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// Absolute tolerance for comparisons; zero for exact types.
    fn tolerance() -> Self;

    /// Builds `num / den`. Panics if `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn to_f64(&self) -> f64;

    /// `floor(self * 2^53)` clamped to `[0, 2^53]`, for threshold sampling.
    fn floor_scaled_53(&self) -> u64;

    fn is_nil(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    fn is_pos(&self) -> bool {
        *self > Self::tolerance()
    }

    fn is_neg(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_nil()
    }

    fn approx_le(&self, other: &Self) -> bool {
        !(self.clone() - other.clone()).is_pos()
    }

    fn approx_lt(&self, other: &Self) -> bool {
        (other.clone() - self.clone()).is_pos()
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

const TWO_53: u64 = 1 << 53;

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn floor_scaled_53(&self) -> u64 {
        if !self.is_positive() {
            return 0;
        }
        let scaled = self * BigRational::from_integer(BigInt::from(TWO_53));
        scaled.floor().to_integer().to_u64().map_or(TWO_53, |v| v.min(TWO_53))
    }
}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            fn tolerance() -> Self {
                $tol
            }

            fn from_ratio(num: i64, den: i64) -> Self {
                assert!(den != 0, "zero denominator");
                num as $t / den as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn floor_scaled_53(&self) -> u64 {
                let v = (*self as f64).clamp(0.0, 1.0) * TWO_53 as f64;
                (v.floor() as u64).min(TWO_53)
            }
        }
    };
}

float_scalar!(f64, 1e-9);
float_scalar!(f32, 1e-5);

/// Parses `"p/q"` or an integer string into an exact rational.
///
/// Decimal points and exponents are rejected on purpose.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let ok = |t: &str| {
        let digits = t.strip_prefix('-').unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !ok(n) || !ok(d) || d.starts_with('-') {
        return None;
    }
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Canonical `"p/q"` (or `"p"` when integral) form of a rational.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_reduced() {
        let r = BigRational::from_ratio(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn parse_rejects_floats() {
        assert!(parse_rational("0.5").is_none());
        assert!(parse_rational("1e3").is_none());
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("3/-4").is_none());
        assert_eq!(parse_rational(" 3/6 "), Some(BigRational::from_ratio(1, 2)));
        assert_eq!(parse_rational("-2"), Some(BigRational::from_ratio(-2, 1)));
    }

    #[test]
    fn format_round_trip() {
        for s in ["1/3", "-7/2", "0", "5"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn scaled_floor() {
        assert_eq!(BigRational::from_ratio(1, 2).floor_scaled_53(), TWO_53 / 2);
        assert_eq!(BigRational::from_ratio(3, 2).floor_scaled_53(), TWO_53);
        assert_eq!(0.25f64.floor_scaled_53(), TWO_53 / 4);
    }

    #[test]
    fn float_tolerance() {
        assert!((0.1f64 + 0.2).approx_eq(&0.3));
        assert!(!BigRational::from_ratio(1, 3).approx_eq(&BigRational::from_ratio(333, 1000)));
    }
}

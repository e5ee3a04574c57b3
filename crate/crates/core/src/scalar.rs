//! Exact scalar types for weights, payoffs and worths.
//!
//! Every algorithm in this crate is generic over [`Scalar`]. The trait is
//! only implemented for exact, totally ordered types: machine integers for
//! fast integral work, and rationals for everything else. Floating point is
//! deliberately absent because core membership is decided by exact
//! inequalities.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{NumAssign, Signed, ToPrimitive, Zero};

/// An exact ordered scalar.
pub trait Scalar:
    Clone + Ord + Debug + Display + Send + Sync + NumAssign + Signed + Sum + 'static
{
    /// Embeds a capacity or multiplicity.
    fn from_count(n: u64) -> Self;

    /// Exact conversion to an arbitrary-precision rational.
    fn to_rational(&self) -> BigRational;

    /// Exact conversion back; `None` if the value is not representable
    /// (a fraction in an integer type, or an overflow).
    fn from_rational(r: &BigRational) -> Option<Self>;

    fn is_integral(&self) -> bool;

    fn times(&self, count: u64) -> Self {
        self.clone() * Self::from_count(count)
    }
}

macro_rules! impl_scalar_int {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn from_count(n: u64) -> Self {
                <$t>::try_from(n).expect("count does not fit the scalar type")
            }

            fn to_rational(&self) -> BigRational {
                BigRational::from_integer(BigInt::from(*self))
            }

            fn from_rational(r: &BigRational) -> Option<Self> {
                if r.is_integer() {
                    r.to_integer().try_into().ok()
                } else {
                    None
                }
            }

            fn is_integral(&self) -> bool {
                true
            }
        }
    )*};
}

impl_scalar_int!(i64, i128);

impl Scalar for BigInt {
    fn from_count(n: u64) -> Self {
        BigInt::from(n)
    }

    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(self.clone())
    }

    fn from_rational(r: &BigRational) -> Option<Self> {
        r.is_integer().then(|| r.to_integer())
    }

    fn is_integral(&self) -> bool {
        true
    }
}

impl Scalar for BigRational {
    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }

    fn from_rational(r: &BigRational) -> Option<Self> {
        Some(r.clone())
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

impl Scalar for Ratio<i64> {
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(i64::try_from(n).expect("count does not fit i64"))
    }

    fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }

    fn from_rational(r: &BigRational) -> Option<Self> {
        Some(Ratio::new(r.numer().to_i64()?, r.denom().to_i64()?))
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

/// Converts between scalar types, failing if the value does not fit.
pub fn convert<A: Scalar, B: Scalar>(a: &A) -> Option<B> {
    B::from_rational(&a.to_rational())
}

/// Formats a rational as `n` or `n/d`.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats any scalar the same way as [`format_rational`].
pub fn format_scalar<T: Scalar>(x: &T) -> String {
    format_rational(&x.to_rational())
}

/// Parses `n`, `-n` or `n/d` with arbitrary-precision decimal integers.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let valid = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) || den.starts_with('-') {
        return None;
    }
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let r = parse_rational("6/4").unwrap();
        assert_eq!(format_rational(&r), "3/2");
        assert_eq!(format_rational(&parse_rational("-7").unwrap()), "-7");
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("1.5").is_none());
        assert!(parse_rational("1/-2").is_none());
        assert!(parse_rational("").is_none());
        assert!(parse_rational("/3").is_none());
    }

    #[test]
    fn big_literals_are_exact() {
        let s = "123456789012345678901234567891/2";
        let r = parse_rational(s).unwrap();
        assert_eq!(format_rational(&r), s);
    }

    #[test]
    fn conversions() {
        let half = parse_rational("1/2").unwrap();
        assert_eq!(i64::from_rational(&half), None);
        assert_eq!(
            convert::<BigRational, Ratio<i64>>(&half),
            Some(Ratio::new(1, 2))
        );
        assert_eq!(convert::<i64, BigInt>(&-3), Some(BigInt::from(-3)));
        assert!(!half.is_integral());
        assert_eq!(5i64.times(3), 15);
    }
}

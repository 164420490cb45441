//! Rationals extended with a single positive infinity.
//!
//! σ̃₋₁ takes values in Q ∪ {∞}: the only infinite value arises from the
//! factor `1^inf`, and every finite value produced in this crate is positive.
//! Infinity compares greater than every finite rational, which is exactly the
//! convention the interval arithmetic in [`crate::bounds`] needs.

use alloc::string::ToString;
use core::cmp::Ordering;
use core::fmt;
use core::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A reduced arbitrary-precision rational, or positive infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtRational {
    Finite(BigRational),
    Infinity,
}

impl ExtRational {
    pub fn from_integer(n: i64) -> Self {
        ExtRational::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds `numer/denom` in lowest terms. Panics if `denom` is zero.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        ExtRational::Finite(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn two() -> Self {
        ExtRational::from_integer(2)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinity => None,
        }
    }

    pub fn into_finite(self) -> Option<BigRational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinity => None,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            ExtRational::Finite(r) => r.is_positive(),
            ExtRational::Infinity => true,
        }
    }
}

impl From<BigRational> for ExtRational {
    fn from(r: BigRational) -> Self {
        ExtRational::Finite(r)
    }
}

impl PartialEq<BigRational> for ExtRational {
    fn eq(&self, other: &BigRational) -> bool {
        matches!(self, ExtRational::Finite(r) if r == other)
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
            (ExtRational::Finite(_), ExtRational::Infinity) => Ordering::Less,
            (ExtRational::Infinity, ExtRational::Finite(_)) => Ordering::Greater,
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
        }
    }
}

/// Multiplication of σ̃₋₁ values. All values in this crate are positive, so
/// `∞ * x = ∞` is unambiguous; multiplying infinity by zero panics.
impl Mul for ExtRational {
    type Output = ExtRational;

    fn mul(self, rhs: ExtRational) -> ExtRational {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a * b),
            (ExtRational::Infinity, ExtRational::Finite(b))
            | (ExtRational::Finite(b), ExtRational::Infinity) => {
                assert!(!b.is_zero(), "infinity * 0 is undefined");
                ExtRational::Infinity
            }
            (ExtRational::Infinity, ExtRational::Infinity) => ExtRational::Infinity,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            ExtRational::Infinity => f.write_str(&"inf".to_string()),
        }
    }
}

//! Factorizations and exact evaluation of σ̃ and σ̃₋₁.
//!
//! A [`Factorization`] is a canonical multiset of `(base, exponent)` pairs.
//! Repeated identical factors are allowed (`7^2 * 7^2` is a different object
//! than `7^4`), and exponents may be the symbolic value `inf`, for which
//! `σ̃₋₁(x^inf) = x/(x-1)` is the limiting value of the finite sums.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::rational::ExtRational;

/// Exponent of a single factor: a finite integer `>= 1` or `inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exponent {
    Finite(u64),
    Infinite,
}

impl Exponent {
    pub fn finite(&self) -> Option<u64> {
        match self {
            Exponent::Finite(a) => Some(*a),
            Exponent::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(a) => write!(f, "{}", a),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

/// One `base^exponent` pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub base: BigInt,
    pub exponent: Exponent,
}

impl Factor {
    pub fn new(base: impl Into<BigInt>, exponent: Exponent) -> Self {
        Factor { base: base.into(), exponent }
    }

    pub fn finite(base: impl Into<BigInt>, exp: u64) -> Self {
        Factor::new(base, Exponent::Finite(exp))
    }

    pub fn infinite(base: impl Into<BigInt>) -> Self {
        Factor::new(base, Exponent::Infinite)
    }

    fn is_trivial_base(&self) -> bool {
        self.base.is_zero() || (self.base.is_negative() && self.base.magnitude().is_one())
    }
}

/// Canonical order: by |base| ascending, positive sign before negative,
/// then exponent ascending with `inf` last.
impl Ord for Factor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base
            .magnitude()
            .cmp(other.base.magnitude())
            .then_with(|| self.base.is_negative().cmp(&other.base.is_negative()))
            .then_with(|| self.exponent.cmp(&other.exponent))
    }
}

impl PartialOrd for Factor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base.is_negative() {
            write!(f, "({})^{}", self.base, self.exponent)
        } else {
            write!(f, "{}^{}", self.base, self.exponent)
        }
    }
}

/// A nonempty multiset of factors, kept sorted in canonical order.
///
/// Equality is multiset equality of `(base, exponent)` pairs; the canonical
/// sort makes that plain `Vec` equality, and makes the `Display` form (and
/// therefore search output) deterministic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factorization {
    factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorizationError {
    /// The factor list was empty.
    Empty,
    /// A finite exponent was zero.
    ZeroExponent,
    /// The operation is only defined for finite exponents.
    InfiniteExponent,
    /// σ̃₋₁ (and everything built on it) is undefined when a base is 0 or -1.
    TrivialBase,
    /// `1^inf` has no finite-exponent replacement.
    NoFiniteReplacement,
    /// Primitivity is only defined for spoof perfect factorizations.
    NotSpoofPerfect,
    /// The primitivity check enumerates all `2^k - 2` proper sub-multisets.
    TooManyFactors(usize),
}

impl fmt::Display for FactorizationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorizationError::Empty => f.write_str("factorization must have at least one factor"),
            FactorizationError::ZeroExponent => f.write_str("exponents must be >= 1"),
            FactorizationError::InfiniteExponent => {
                f.write_str("operation requires all exponents to be finite")
            }
            FactorizationError::TrivialBase => {
                f.write_str("operation is undefined for trivial factorizations (base 0 or -1)")
            }
            FactorizationError::NoFiniteReplacement => {
                f.write_str("1^inf has no finite-exponent replacement")
            }
            FactorizationError::NotSpoofPerfect => {
                f.write_str("primitivity is only defined for spoof perfect factorizations")
            }
            FactorizationError::TooManyFactors(k) => {
                write!(f, "refusing to enumerate 2^{} sub-multisets", k)
            }
        }
    }
}

impl Factorization {
    pub fn new(factors: Vec<Factor>) -> Result<Self, FactorizationError> {
        if factors.is_empty() {
            return Err(FactorizationError::Empty);
        }
        if factors.iter().any(|f| f.exponent == Exponent::Finite(0)) {
            return Err(FactorizationError::ZeroExponent);
        }
        let mut factors = factors;
        factors.sort();
        Ok(Factorization { factors })
    }

    /// Convenience constructor for finite-exponent factorizations.
    pub fn from_pairs(pairs: &[(i64, u64)]) -> Result<Self, FactorizationError> {
        Factorization::new(pairs.iter().map(|&(base, exp)| Factor::finite(base, exp)).collect())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    /// True iff some base is 0 or -1.
    pub fn is_trivial(&self) -> bool {
        self.factors.iter().any(Factor::is_trivial_base)
    }

    /// True iff every base is odd (so the product value is odd).
    pub fn is_odd(&self) -> bool {
        self.factors.iter().all(|f| f.base.is_odd())
    }

    pub fn has_infinite_exponent(&self) -> bool {
        self.factors.iter().any(|f| f.exponent.is_infinite())
    }

    /// The product value `n = prod x_i^{a_i}`. Requires finite exponents.
    pub fn product_value(&self) -> Result<BigInt, FactorizationError> {
        let mut n = BigInt::one();
        for f in &self.factors {
            let a = f.exponent.finite().ok_or(FactorizationError::InfiniteExponent)?;
            n *= int_pow(&f.base, a);
        }
        Ok(n)
    }

    /// `σ̃ = prod (1 + x_i + ... + x_i^{a_i})`. Requires finite exponents.
    ///
    /// The result is 0 exactly when some factor has base -1 with odd exponent.
    pub fn sigma_tilde(&self) -> Result<BigInt, FactorizationError> {
        let mut s = BigInt::one();
        for f in &self.factors {
            let a = f.exponent.finite().ok_or(FactorizationError::InfiniteExponent)?;
            s *= factor_sigma_tilde(&f.base, a);
        }
        Ok(s)
    }

    /// `σ̃₋₁ = prod (1 + 1/x_i + ... + 1/x_i^{a_i})`, exactly.
    ///
    /// Infinite exponents contribute `x/(x-1)`; the result is `inf` exactly
    /// when some factor is `1^inf`. Errors on trivial factorizations, where
    /// the value is not defined.
    pub fn sigma_tilde_inv(&self) -> Result<ExtRational, FactorizationError> {
        if self.is_trivial() {
            return Err(FactorizationError::TrivialBase);
        }
        let mut v = ExtRational::from_integer(1);
        for f in &self.factors {
            v = v * factor_sigma_inv(&f.base, f.exponent);
        }
        Ok(v)
    }

    /// Spoof perfection: `σ̃₋₁ = 2` for nontrivial factorizations. Trivial
    /// factorizations with finite exponents fall back to the defining
    /// equation `σ̃ = 2n` (so e.g. `0^5 * (-1)^3` counts); a trivial
    /// factorization with an infinite exponent has no σ̃ value and reports
    /// `false`.
    pub fn is_spoof_perfect(&self) -> bool {
        if !self.is_trivial() {
            return self
                .sigma_tilde_inv()
                .expect("nontrivial factorization has a sigma value")
                == ExtRational::two();
        }
        match (self.sigma_tilde(), self.product_value()) {
            (Ok(s), Ok(n)) => s == 2 * n,
            _ => false,
        }
    }

    /// True iff no proper nonempty sub-multiset of factors is itself spoof
    /// perfect. Checks all `2^k - 2` candidates; callers are expected to stay
    /// at desk scale (k <= 20).
    pub fn is_primitive(&self) -> Result<bool, FactorizationError> {
        if self.is_trivial() {
            return Err(FactorizationError::TrivialBase);
        }
        if !self.is_spoof_perfect() {
            return Err(FactorizationError::NotSpoofPerfect);
        }
        let k = self.factors.len();
        if k > 20 {
            return Err(FactorizationError::TooManyFactors(k));
        }
        let values: Vec<ExtRational> =
            self.factors.iter().map(|f| factor_sigma_inv(&f.base, f.exponent)).collect();
        let target = ExtRational::two();
        // DFS over include/exclude, sharing partial products along the path.
        fn any_proper_subset_is_two(
            values: &[ExtRational],
            idx: usize,
            count: usize,
            product: ExtRational,
            target: &ExtRational,
        ) -> bool {
            if idx == values.len() {
                return count > 0 && count < values.len() && product == *target;
            }
            any_proper_subset_is_two(values, idx + 1, count, product.clone(), target)
                || any_proper_subset_is_two(
                    values,
                    idx + 1,
                    count + 1,
                    product * values[idx].clone(),
                    target,
                )
        }
        Ok(!any_proper_subset_is_two(&values, 0, 0, ExtRational::from_integer(1), &target))
    }

    /// Replaces every factor `x^inf` by `(x-1)^1`, which has the same σ̃₋₁
    /// value. Errors on `1^inf` (σ̃₋₁ = inf has no finite replacement) and on
    /// trivial bases.
    pub fn replace_infinite(&self) -> Result<Factorization, FactorizationError> {
        if self.is_trivial() {
            return Err(FactorizationError::TrivialBase);
        }
        let mut out = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            match f.exponent {
                Exponent::Infinite => {
                    if f.base.is_one() {
                        return Err(FactorizationError::NoFiniteReplacement);
                    }
                    out.push(Factor::finite(&f.base - 1, 1));
                }
                Exponent::Finite(_) => out.push(f.clone()),
            }
        }
        Factorization::new(out)
    }

    /// Multiset union of two factorizations.
    pub fn concat(&self, other: &Factorization) -> Factorization {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Factorization::new(factors).expect("both inputs are nonempty and valid")
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "{}", factor)?;
        }
        Ok(())
    }
}

pub(crate) fn int_pow(x: &BigInt, a: u64) -> BigInt {
    Pow::pow(x, a)
}

/// `σ̃(x^a) = 1 + x + ... + x^a` as an integer. Defined for every base,
/// including 0 and -1.
pub(crate) fn factor_sigma_tilde(x: &BigInt, a: u64) -> BigInt {
    if x.is_one() {
        return BigInt::from(a + 1);
    }
    // Geometric sum (x^{a+1} - 1)/(x - 1); the division is exact.
    (int_pow(x, a + 1) - 1) / (x - 1)
}

/// `σ̃₋₁(x^a)` for a nontrivial base, with `σ̃₋₁(x^inf) = x/(x-1)` and
/// `σ̃₋₁(1^inf) = inf`.
pub(crate) fn factor_sigma_inv(x: &BigInt, exponent: Exponent) -> ExtRational {
    debug_assert!(!x.is_zero() && *x != BigInt::from(-1));
    match exponent {
        Exponent::Finite(a) => {
            if x.is_one() {
                ExtRational::Finite(BigRational::from_integer(BigInt::from(a + 1)))
            } else {
                let numer = int_pow(x, a + 1) - 1;
                let denom = int_pow(x, a) * (x - 1);
                ExtRational::Finite(BigRational::new(numer, denom))
            }
        }
        Exponent::Infinite => {
            if x.is_one() {
                ExtRational::Infinity
            } else {
                ExtRational::Finite(BigRational::new(x.clone(), x - 1))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    Empty,
    MalformedFactor(String),
    InvalidBase(String),
    InvalidExponent(String),
    ZeroExponent,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Empty => f.write_str("empty factorization"),
            ParseError::MalformedFactor(s) => write!(f, "malformed factor: {:?}", s),
            ParseError::InvalidBase(s) => write!(f, "invalid base: {:?}", s),
            ParseError::InvalidExponent(s) => write!(f, "invalid exponent: {:?}", s),
            ParseError::ZeroExponent => f.write_str("exponents must be >= 1"),
        }
    }
}

/// Parses the canonical text form, e.g. `1^2 * (-3)^1` or `2^inf`.
///
/// Negative bases may be written with or without parentheses; whitespace
/// around the `*` separators is flexible. The result is canonicalized.
pub fn parse(text: &str) -> Result<Factorization, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut factors = Vec::new();
    for piece in text.split('*') {
        let piece = piece.trim();
        let (base_str, exp_str) = piece
            .split_once('^')
            .ok_or_else(|| ParseError::MalformedFactor(piece.to_owned()))?;
        let base_str = base_str.trim();
        let inner = if base_str.starts_with('(') && base_str.ends_with(')') && base_str.len() >= 2 {
            base_str[1..base_str.len() - 1].trim()
        } else {
            base_str
        };
        let base =
            BigInt::from_str(inner).map_err(|_| ParseError::InvalidBase(base_str.to_owned()))?;
        let exp_str = exp_str.trim();
        let exponent = if exp_str == "inf" {
            Exponent::Infinite
        } else {
            let a = u64::from_str(exp_str)
                .map_err(|_| ParseError::InvalidExponent(exp_str.to_owned()))?;
            if a == 0 {
                return Err(ParseError::ZeroExponent);
            }
            Exponent::Finite(a)
        };
        factors.push(Factor::new(base, exponent));
    }
    Factorization::new(factors).map_err(|e| match e {
        FactorizationError::Empty => ParseError::Empty,
        FactorizationError::ZeroExponent => ParseError::ZeroExponent,
        _ => ParseError::MalformedFactor(text.to_owned()),
    })
}

impl FromStr for Factorization {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn fac(text: &str) -> Factorization {
        parse(text).expect(text)
    }

    #[test]
    fn parse_descartes() {
        let f = fac("3^2 * 7^2 * 11^2 * 13^2 * 22021^1");
        assert_eq!(f.len(), 5);
        assert_eq!(f.factors()[4], Factor::finite(22021, 1));
    }

    #[test]
    fn parse_smallest_and_infinite() {
        assert_eq!(fac("1^1").factors(), &[Factor::finite(1, 1)]);
        assert_eq!(fac("(-3)^inf").factors(), &[Factor::infinite(-3)]);
        // unparenthesized negative bases are accepted on input
        assert_eq!(fac("-3^inf"), fac("(-3)^inf"));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse(""), Err(ParseError::Empty)));
        assert!(matches!(parse("3^^2"), Err(ParseError::InvalidExponent(_))));
        assert!(matches!(parse("3^0"), Err(ParseError::ZeroExponent)));
        assert!(matches!(parse("^2"), Err(ParseError::InvalidBase(_))));
        assert!(matches!(parse("3 * 5"), Err(ParseError::MalformedFactor(_))));
        assert!(matches!(parse("3^inf * "), Err(ParseError::MalformedFactor(_))));
    }

    #[test]
    fn display_canonical_order() {
        let f = Factorization::new(vec![Factor::finite(-3, 1), Factor::finite(1, 2)]).unwrap();
        assert_eq!(f.to_string(), "1^2 * (-3)^1");
        assert_eq!(fac("2^1").to_string(), "2^1");
        assert_eq!(fac("(-3)^inf").to_string(), "(-3)^inf");
        // |base| ties: positive before negative, exponents ascending, inf last
        let g = parse("(-7)^2 * 7^2 * (-7)^inf * (-7)^1").unwrap();
        assert_eq!(g.to_string(), "7^2 * (-7)^1 * (-7)^2 * (-7)^inf");
    }

    #[test]
    fn roundtrip_is_identity() {
        for text in [
            "1^1",
            "1^2 * (-3)^1",
            "3^2 * 7^2 * 11^2 * 13^2 * 22021^1",
            "2^inf",
            "7^2 * (-7)^2 * (-2451)^1",
        ] {
            assert_eq!(fac(text).to_string(), text);
        }
    }

    #[test]
    fn product_value_examples() {
        assert_eq!(
            fac("3^2 * 7^2 * 11^2 * 13^2 * 22021^1").product_value().unwrap(),
            BigInt::from(198585576189u64)
        );
        assert_eq!(fac("1^1").product_value().unwrap(), BigInt::one());
        assert_eq!(fac("(-3)^1 * 1^2").product_value().unwrap(), BigInt::from(-3));
        assert_eq!(fac("2^inf").product_value(), Err(FactorizationError::InfiniteExponent));
    }

    #[test]
    fn sigma_tilde_examples() {
        assert_eq!(fac("(-1)^3").sigma_tilde().unwrap(), BigInt::zero());
        assert_eq!(fac("1^1").sigma_tilde().unwrap(), BigInt::from(2));
        let descartes = fac("3^2 * 7^2 * 11^2 * 13^2 * 22021^1");
        assert_eq!(descartes.sigma_tilde().unwrap(), BigInt::from(2 * 198585576189u64));
    }

    #[test]
    fn sigma_tilde_inv_examples() {
        assert_eq!(fac("3^2 * 3^2").sigma_tilde_inv().unwrap(), ExtRational::ratio(169, 81));
        assert_eq!(
            fac("(-3)^2 * 7^2 * 7^2 * (-19)^2").sigma_tilde_inv().unwrap(),
            ExtRational::from_integer(1)
        );
        assert_eq!(fac("2^inf").sigma_tilde_inv().unwrap(), ExtRational::from_integer(2));
        assert_eq!(fac("(-2)^8").sigma_tilde_inv().unwrap(), ExtRational::ratio(171, 256));
        assert_eq!(fac("1^inf").sigma_tilde_inv().unwrap(), ExtRational::Infinity);
        assert_eq!(fac("(-1)^2").sigma_tilde_inv(), Err(FactorizationError::TrivialBase));
        assert_eq!(fac("0^1 * 3^2").sigma_tilde_inv(), Err(FactorizationError::TrivialBase));
    }

    #[test]
    fn spoof_perfect_examples() {
        assert!(fac("3^4 * 7^2 * 11^2 * 19^2 * (-127)^1").is_spoof_perfect());
        assert!(fac("0^5 * (-1)^3").is_spoof_perfect());
        assert!(!fac("3^2 * 3^2").is_spoof_perfect());
        assert!(fac("2^inf").is_spoof_perfect());
        // trivial with an infinite exponent: no sigma value, reported false
        assert!(!fac("0^5 * (-1)^3 * 2^inf").is_spoof_perfect());
    }

    #[test]
    fn trivial_examples() {
        assert!(fac("(-1)^2 * 1^1").is_trivial());
        assert!(!fac("1^1").is_trivial());
        assert!(!fac("(-3)^1 * 1^2").is_trivial());
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(fac("1^2 * (-3)^2 * (-5)^2 * 49^1").is_primitive(), Ok(true));
        let extended = fac("1^1 * (-3)^2 * 7^2 * 7^2 * (-19)^2");
        assert!(extended.is_spoof_perfect());
        assert_eq!(extended.is_primitive(), Ok(false));
        assert_eq!(fac("1^2 * (-3)^1").is_primitive(), Ok(true));
        assert_eq!(fac("3^2 * 3^2").is_primitive(), Err(FactorizationError::NotSpoofPerfect));
    }

    #[test]
    fn replace_infinite_examples() {
        assert_eq!(fac("2^inf").replace_infinite().unwrap(), fac("1^1"));
        assert_eq!(fac("3^inf * 5^2").replace_infinite().unwrap(), fac("2^1 * 5^2"));
        assert_eq!(fac("7^3").replace_infinite().unwrap(), fac("7^3"));
        assert_eq!(fac("1^inf").replace_infinite(), Err(FactorizationError::NoFiniteReplacement));
        let before = fac("3^inf * 5^2");
        assert_eq!(
            before.replace_infinite().unwrap().sigma_tilde_inv(),
            before.sigma_tilde_inv()
        );
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let f = fac("(-19)^2 * 3^4 * 7^2 * 7^2 * (-19)^1 * 11^2");
        let again = Factorization::new(f.factors().to_vec()).unwrap();
        assert_eq!(f, again);
        assert_eq!(f.to_string(), "3^4 * 7^2 * 7^2 * 11^2 * (-19)^1 * (-19)^2");
    }
}

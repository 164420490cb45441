//! Exact rational bounds on σ̃₋₁ over partial factorizations.
//!
//! A [`PartialFactorization`] fixes a set of bases and constrains each
//! exponent to either a single value or a half-infinite range `[b, inf]`.
//! σ̃₋₁ is monotone in a useful way over such ranges:
//!
//! * positive base: strictly increasing in the exponent, with values in
//!   `[(x+1)/x, x/(x-1)]` (base 1 escapes to infinity);
//! * negative base: odd exponents increase toward the limit `x/(x-1)` from
//!   below, even exponents decrease toward it from above.
//!
//! [`bounds_lu`] multiplies the per-factor extremes into a sandwich
//! `L(S) <= σ̃₋₁(completion) <= U(S)`, and the `case*` functions turn an
//! out-of-balance sandwich into a finite interval of candidate next bases,
//! using exact integer bracketing (no floating point anywhere).

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::factorization::{factor_sigma_inv, Exponent};
use crate::rational::ExtRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundsError {
    Empty,
    /// The odd search works over odd bases only.
    EvenBase(BigInt),
    /// Bases -1 and 0 have no σ̃₋₁ value (0 is already excluded by oddness).
    TrivialBase,
    ZeroExponent,
    /// case1_interval requires an abundant prefix (L > 2).
    NotAbundant,
    /// case2_interval requires a deficient prefix (U < 2).
    NotDeficient,
    /// case3_threshold requires L <= 2 <= U with L < U and an open exponent.
    NotIndeterminate,
    /// No remaining base slot: the interval operations need m < k.
    NoRoom,
    /// The threshold scan exceeded its cap; this indicates a bug, not a
    /// mathematical possibility.
    ThresholdCapExceeded { cap: u64 },
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::Empty => f.write_str("partial factorization must be nonempty"),
            BoundsError::EvenBase(x) => write!(f, "base {} is even", x),
            BoundsError::TrivialBase => f.write_str("bases -1 and 0 are not allowed"),
            BoundsError::ZeroExponent => f.write_str("exponent bounds must be >= 1"),
            BoundsError::NotAbundant => f.write_str("lower bound is not above 2"),
            BoundsError::NotDeficient => f.write_str("upper bound is not below 2"),
            BoundsError::NotIndeterminate => {
                f.write_str("bounds must straddle 2 with an open exponent range")
            }
            BoundsError::NoRoom => f.write_str("no remaining base slot (m < k required)"),
            BoundsError::ThresholdCapExceeded { cap } => {
                write!(f, "threshold scan exceeded cap {}", cap)
            }
        }
    }
}

/// Exponent constraint of one partial factor: pinned to one value, or
/// anything at or above a lower bound (including infinity).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExponentRange {
    Fixed(u64),
    AtLeast(u64),
}

impl ExponentRange {
    pub fn lower(&self) -> u64 {
        match self {
            ExponentRange::Fixed(b) | ExponentRange::AtLeast(b) => *b,
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, ExponentRange::Fixed(_))
    }
}

/// One base with its exponent constraint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialFactor {
    pub base: BigInt,
    pub range: ExponentRange,
}

/// An ordered list of partial factors. Bases are odd and nontrivial; the
/// exponent-parity admissibility rule is the search engine's concern, not a
/// structural invariant, so bound computations stay total.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialFactorization {
    entries: Vec<PartialFactor>,
}

impl PartialFactorization {
    pub fn new(entries: Vec<PartialFactor>) -> Result<Self, BoundsError> {
        if entries.is_empty() {
            return Err(BoundsError::Empty);
        }
        for e in &entries {
            if e.base.is_even() {
                return Err(BoundsError::EvenBase(e.base.clone()));
            }
            if e.base == BigInt::from(-1) {
                return Err(BoundsError::TrivialBase);
            }
            if e.range.lower() == 0 {
                return Err(BoundsError::ZeroExponent);
            }
        }
        Ok(PartialFactorization { entries })
    }

    pub fn from_triples(triples: &[(i64, u64, Option<u64>)]) -> Result<Self, BoundsError> {
        let entries = triples
            .iter()
            .map(|&(x, b, c)| PartialFactor {
                base: BigInt::from(x),
                range: match c {
                    Some(c) => {
                        assert_eq!(b, c, "exponent ranges are [b, b] or [b, inf] only");
                        ExponentRange::Fixed(b)
                    }
                    None => ExponentRange::AtLeast(b),
                },
            })
            .collect();
        PartialFactorization::new(entries)
    }

    pub fn entries(&self) -> &[PartialFactor] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_open_range(&self) -> bool {
        self.entries.iter().any(|e| !e.range.is_fixed())
    }

    pub fn push(&self, factor: PartialFactor) -> Result<Self, BoundsError> {
        let mut entries = self.entries.clone();
        entries.push(factor);
        PartialFactorization::new(entries)
    }

    /// Raises every open lower bound to at least `b`; fixed exponents are
    /// untouched. Denoted S_b: completions of S whose open exponents are all
    /// >= b are exactly the completions of S_b.
    pub fn raise_open_lower_bounds(&self, b: u64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| match e.range {
                ExponentRange::AtLeast(lo) => PartialFactor {
                    base: e.base.clone(),
                    range: ExponentRange::AtLeast(lo.max(b)),
                },
                ExponentRange::Fixed(_) => e.clone(),
            })
            .collect();
        PartialFactorization { entries }
    }
}

/// The sandwich `[lower, upper]` on σ̃₋₁ over all completions; the upper
/// bound is infinite exactly when base 1 has an open exponent range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundPair {
    pub lower: BigRational,
    pub upper: ExtRational,
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn sigma_inv_finite(x: &BigInt, a: u64) -> BigRational {
    factor_sigma_inv(x, Exponent::Finite(a))
        .into_finite()
        .expect("finite exponent gives finite value")
}

/// Min and max of σ̃₋₁(x^a) over the exponent range (infinity included for
/// open ranges).
pub fn factor_range(x: &BigInt, range: ExponentRange) -> Result<BoundPair, BoundsError> {
    if x.is_zero() || *x == BigInt::from(-1) {
        return Err(BoundsError::TrivialBase);
    }
    if range.lower() == 0 {
        return Err(BoundsError::ZeroExponent);
    }
    let pair = match range {
        ExponentRange::Fixed(b) => {
            let v = sigma_inv_finite(x, b);
            BoundPair { lower: v.clone(), upper: ExtRational::Finite(v) }
        }
        ExponentRange::AtLeast(b) => {
            if x.is_positive() {
                let lower = sigma_inv_finite(x, b);
                let upper = factor_sigma_inv(x, Exponent::Infinite);
                BoundPair { lower, upper }
            } else {
                // odd exponents approach the limit from below, even from above
                let least_odd = if b % 2 == 1 { b } else { b + 1 };
                let least_even = if b % 2 == 0 { b } else { b + 1 };
                BoundPair {
                    lower: sigma_inv_finite(x, least_odd),
                    upper: ExtRational::Finite(sigma_inv_finite(x, least_even)),
                }
            }
        }
    };
    Ok(pair)
}

/// L(S) and U(S): the product of the per-factor extremes.
pub fn bounds_lu(s: &PartialFactorization) -> BoundPair {
    let mut lower = rat(1);
    let mut upper = ExtRational::from_integer(1);
    for e in &s.entries {
        let r = factor_range(&e.base, e.range).expect("entries are validated");
        lower *= r.lower;
        upper = upper * r.upper;
    }
    BoundPair { lower, upper }
}

/// A (possibly empty) inclusive range of integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntInterval {
    pub min: BigInt,
    pub max: BigInt,
}

impl IntInterval {
    pub fn is_empty(&self) -> bool {
        self.min > self.max
    }

    pub fn iter(&self) -> impl Iterator<Item = BigInt> + '_ {
        let mut next = self.min.clone();
        core::iter::from_fn(move || {
            if next > self.max {
                None
            } else {
                let out = next.clone();
                next += 1;
                Some(out)
            }
        })
    }

    pub fn contains(&self, y: &BigInt) -> bool {
        *y >= self.min && *y <= self.max
    }
}

fn pow_rat(r: &BigRational, e: u64) -> BigRational {
    r.pow(e as i32)
}

/// Candidate next negative bases for an abundant prefix: all y < 0 with
/// `L * ((y+1)/y)^(k-m) <= 2`, i.e. `y >= 1/((2/L)^{1/(k-m)} - 1)`. The
/// endpoint is found by exact bracketing of the cross-multiplied inequality.
/// Returns the interval `[y_min, -2]` (possibly empty; -1 is never included).
pub fn case1_interval(
    lower: &BigRational,
    k: usize,
    m: usize,
) -> Result<IntInterval, BoundsError> {
    if *lower <= rat(2) {
        return Err(BoundsError::NotAbundant);
    }
    if m >= k {
        return Err(BoundsError::NoRoom);
    }
    let r = (k - m) as u64;
    let target = rat(2) / lower; // in (0, 1)
    let ok = |y: &BigInt| -> bool {
        let ratio = BigRational::new(y + 1, y.clone());
        pow_rat(&ratio, r) <= target
    };
    let minus_two = BigInt::from(-2);
    if !ok(&minus_two) {
        return Ok(IntInterval { min: BigInt::from(-1), max: minus_two });
    }
    // gallop out to the first failing magnitude, then bisect
    let mut good = BigInt::from(2); // |y| known to satisfy
    loop {
        let trial: BigInt = &good * 2;
        if ok(&-trial.clone()) {
            good = trial;
        } else {
            let mut lo = good.clone(); // ok
            let mut hi = trial; // not ok
            while &hi - &lo > BigInt::one() {
                let mid: BigInt = (&lo + &hi) / 2;
                if ok(&-mid.clone()) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(IntInterval { min: -lo, max: minus_two });
        }
    }
}

/// Candidate next positive bases for a deficient prefix: all y > 0 with
/// `U * (y/(y-1))^(k-m) >= 2` (y = 1 always qualifies, with value infinity).
/// Returns the interval `[1, y_max]`.
pub fn case2_interval(
    upper: &BigRational,
    k: usize,
    m: usize,
) -> Result<IntInterval, BoundsError> {
    if *upper >= rat(2) {
        return Err(BoundsError::NotDeficient);
    }
    if m >= k {
        return Err(BoundsError::NoRoom);
    }
    if !upper.is_positive() {
        return Err(BoundsError::NotDeficient);
    }
    let r = (k - m) as u64;
    let target = rat(2) / upper; // > 1
    let ok = |y: &BigInt| -> bool {
        let ratio = BigRational::new(y.clone(), y - 1);
        pow_rat(&ratio, r) >= target
    };
    let one = BigInt::one();
    if !ok(&BigInt::from(2)) {
        return Ok(IntInterval { min: one.clone(), max: one });
    }
    let mut good = BigInt::from(2);
    loop {
        let trial: BigInt = &good * 2;
        if ok(&trial) {
            good = trial;
        } else {
            let mut lo = good.clone(); // ok
            let mut hi = trial; // not ok
            while &hi - &lo > BigInt::one() {
                let mid: BigInt = (&lo + &hi) / 2;
                if ok(&mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(IntInterval { min: one, max: lo });
        }
    }
}

const THRESHOLD_CAP: u64 = 1_000_000;

/// Least `b >= max { open lower bounds }` such that raising every open
/// exponent range to `[b, inf]` pushes the sandwich off 2 (L > 2 or U < 2).
///
/// Such a b exists because L and U converge monotonically to a common limit
/// that cannot equal 2: every open factor contributes x/(x-1) to it, which
/// has negative 2-adic valuation for odd x, and an admissible prefix has
/// 2-adic valuation 0 or 1.
pub fn case3_threshold(s: &PartialFactorization) -> Result<u64, BoundsError> {
    RangeCache::new().case3_threshold(s)
}

/// Positive rational kept unreduced: the hot search paths only ever compare
/// bound products against 2 (or each other), which cross-multiplication does
/// exactly without paying for a gcd on every multiplication.
#[derive(Clone, Debug)]
pub struct RawRational {
    num: BigUint,
    den: BigUint,
}

impl RawRational {
    fn one() -> Self {
        RawRational { num: BigUint::one(), den: BigUint::one() }
    }

    fn from_positive(r: &BigRational) -> Self {
        debug_assert!(r.is_positive());
        RawRational { num: r.numer().magnitude().clone(), den: r.denom().magnitude().clone() }
    }

    fn mul_assign(&mut self, other: &RawRational) {
        self.num *= &other.num;
        self.den *= &other.den;
    }

    fn cmp_int(&self, n: u64) -> core::cmp::Ordering {
        self.num.cmp(&(&self.den * n))
    }

    fn cmp(&self, other: &RawRational) -> core::cmp::Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone().into(), self.den.clone().into())
    }
}

/// Unreduced bound sandwich; `upper = None` means infinity.
#[derive(Clone, Debug)]
pub struct RawBoundPair {
    pub lower: RawRational,
    upper: Option<RawRational>,
}

impl RawBoundPair {
    pub fn lower_above_2(&self) -> bool {
        self.lower.cmp_int(2) == core::cmp::Ordering::Greater
    }

    pub fn upper_below_2(&self) -> bool {
        matches!(&self.upper, Some(u) if u.cmp_int(2) == core::cmp::Ordering::Less)
    }

    pub fn degenerate(&self) -> bool {
        matches!(&self.upper, Some(u) if self.lower.cmp(u) == core::cmp::Ordering::Equal)
    }

    pub fn upper_rational(&self) -> ExtRational {
        match &self.upper {
            Some(u) => ExtRational::Finite(u.to_rational()),
            None => ExtRational::Infinity,
        }
    }

    fn decisive(&self) -> bool {
        self.lower_above_2() || self.upper_below_2()
    }
}

/// Memoized per-factor ranges. σ̃₋₁ extremes of the same `(base, range)`
/// pair are requested millions of times across a search, so the hot paths
/// go through this cache; the free functions are thin wrappers around it.
pub struct RangeCache {
    ranges: alloc::collections::BTreeMap<
        BigInt,
        alloc::collections::BTreeMap<ExponentRange, (RawRational, Option<RawRational>)>,
    >,
}

impl Default for RangeCache {
    fn default() -> Self {
        RangeCache::new()
    }
}

impl RangeCache {
    pub fn new() -> Self {
        RangeCache { ranges: alloc::collections::BTreeMap::new() }
    }

    fn with_raw_range<T>(
        &mut self,
        x: &BigInt,
        range: ExponentRange,
        use_range: impl FnOnce(&(RawRational, Option<RawRational>)) -> T,
    ) -> T {
        if let Some(hit) = self.ranges.get(x).and_then(|per_base| per_base.get(&range)) {
            return use_range(hit);
        }
        let computed = factor_range(x, range).expect("validated entries");
        let raw = (
            RawRational::from_positive(&computed.lower),
            computed.upper.as_finite().map(RawRational::from_positive),
        );
        let out = use_range(&raw);
        self.ranges.entry(x.clone()).or_default().insert(range, raw);
        out
    }

    pub fn factor_range(&mut self, x: &BigInt, range: ExponentRange) -> BoundPair {
        self.with_raw_range(x, range, |(lower, upper)| BoundPair {
            lower: lower.to_rational(),
            upper: match upper {
                Some(u) => ExtRational::Finite(u.to_rational()),
                None => ExtRational::Infinity,
            },
        })
    }

    /// Bounds of `s` with every open lower bound raised to at least `b`
    /// (`b = 0` gives the plain bounds), as unreduced products.
    pub fn raw_bounds(&mut self, s: &PartialFactorization, b: u64) -> RawBoundPair {
        let mut lower = RawRational::one();
        let mut upper = Some(RawRational::one());
        for e in s.entries() {
            let range = match e.range {
                ExponentRange::AtLeast(lo) => ExponentRange::AtLeast(lo.max(b)),
                fixed => fixed,
            };
            self.with_raw_range(&e.base, range, |(lo, up)| {
                lower.mul_assign(lo);
                match (&mut upper, up) {
                    (Some(acc), Some(up)) => acc.mul_assign(up),
                    (acc, None) => *acc = None,
                    (None, _) => {}
                }
            });
        }
        RawBoundPair { lower, upper }
    }

    pub fn bounds_lu(&mut self, s: &PartialFactorization) -> BoundPair {
        let raw = self.raw_bounds(s, 0);
        BoundPair { lower: raw.lower.to_rational(), upper: raw.upper_rational() }
    }

    pub fn case3_threshold(&mut self, s: &PartialFactorization) -> Result<u64, BoundsError> {
        let pair = self.raw_bounds(s, 0);
        if pair.decisive() || !s.has_open_range() || pair.degenerate() {
            return Err(BoundsError::NotIndeterminate);
        }
        let start = s
            .entries
            .iter()
            .filter(|e| !e.range.is_fixed())
            .map(|e| e.range.lower())
            .max()
            .expect("open range exists");
        // decisive(b) is monotone: L only grows and U only shrinks with b,
        // so gallop out to a decisive bound and bisect for the least one
        if self.raw_bounds(s, start).decisive() {
            return Ok(start);
        }
        let mut step = 1u64;
        let mut known_bad = start;
        let good = loop {
            let probe = start + step;
            if self.raw_bounds(s, probe).decisive() {
                break probe;
            }
            known_bad = probe;
            step *= 2;
            if step > THRESHOLD_CAP {
                return Err(BoundsError::ThresholdCapExceeded { cap: THRESHOLD_CAP });
            }
        };
        let (mut bad, mut good) = (known_bad, good);
        while good - bad > 1 {
            let mid = bad + (good - bad) / 2;
            if self.raw_bounds(s, mid).decisive() {
                good = mid;
            } else {
                bad = mid;
            }
        }
        Ok(good)
    }
}

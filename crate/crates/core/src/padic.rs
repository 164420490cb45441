//! q-adic valuations, multiplicative orders, and 2-adic structure tests.
//!
//! For an odd prime q and a base x with q ∤ x, the valuation of σ̃₋₁(x^a)
//! has a closed form in terms of the multiplicative order o_q(x):
//!
//! ```text
//! v_q(σ̃₋₁(x^a)) = -a·v_q(x)                       if q | x
//!                = v_q(x^{o_q(x)} - 1) + v_q(a+1)  if o_q(x) | (a+1), o_q(x) != 1
//!                = v_q(a+1)                        if o_q(x) = 1
//!                = 0                               otherwise
//! ```
//!
//! [`sigma_inv_valuation`] implements this formula (falling back to direct
//! evaluation for q = 2), and [`padic_prune`] uses it to discard search
//! prefixes whose valuation at some prime can never be cancelled.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::factorization::{factor_sigma_inv, factor_sigma_tilde, Exponent, Factorization};

/// Largest prime accepted by the deterministic Miller-Rabin witness set used
/// here. The witnesses {2, 3, 5, 7, 11, 13, 17} are known to be exact below
/// 3.4e14; we stay under that with a round cap.
pub const MAX_PRIME: u64 = 330_000_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PadicError {
    /// Valuation of zero is +infinity and not representable.
    ZeroValue,
    NotPrime(u64),
    PrimeTooLarge(u64),
    /// Odd-prime operation called with q = 2.
    EvenPrime,
    /// Multiplicative order is undefined when q divides x.
    DivisibleBase(u64),
    ZeroBase,
    ZeroExponent,
    /// The Eulerian test applies to odd factorizations only.
    NotOdd,
    Trivial,
    InfiniteExponent,
}

impl fmt::Display for PadicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicError::ZeroValue => f.write_str("valuation of zero is undefined"),
            PadicError::NotPrime(q) => write!(f, "{} is not prime", q),
            PadicError::PrimeTooLarge(q) => {
                write!(f, "{} exceeds the deterministic primality cap {}", q, MAX_PRIME)
            }
            PadicError::EvenPrime => f.write_str("operation requires an odd prime"),
            PadicError::DivisibleBase(q) => write!(f, "order mod {} undefined: q divides x", q),
            PadicError::ZeroBase => f.write_str("base must be nonzero"),
            PadicError::ZeroExponent => f.write_str("exponent must be >= 1"),
            PadicError::NotOdd => f.write_str("all bases must be odd"),
            PadicError::Trivial => f.write_str("factorization must be nontrivial"),
            PadicError::InfiniteExponent => f.write_str("all exponents must be finite"),
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for n < 3.4e14 (witnesses 2..17).
pub fn is_prime(n: u64) -> bool {
    debug_assert!(n <= MAX_PRIME);
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn check_prime(q: u64) -> Result<(), PadicError> {
    if q > MAX_PRIME {
        return Err(PadicError::PrimeTooLarge(q));
    }
    if !is_prime(q) {
        return Err(PadicError::NotPrime(q));
    }
    Ok(())
}

/// v_q(n) for a nonzero integer.
pub fn int_valuation(q: u64, n: &BigInt) -> Result<u64, PadicError> {
    check_prime(q)?;
    if n.is_zero() {
        return Err(PadicError::ZeroValue);
    }
    Ok(uint_valuation(q, n.magnitude()))
}

fn uint_valuation(q: u64, n: &BigUint) -> u64 {
    let qq = BigUint::from(q);
    let mut v = 0;
    let mut rem = n.clone();
    loop {
        let (quot, r) = rem.div_rem(&qq);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        rem = quot;
    }
}

/// v_q of a nonzero rational: v_q(numerator) - v_q(denominator).
pub fn valuation(q: u64, r: &BigRational) -> Result<i64, PadicError> {
    check_prime(q)?;
    if r.is_zero() {
        return Err(PadicError::ZeroValue);
    }
    Ok(uint_valuation(q, r.numer().magnitude()) as i64
        - uint_valuation(q, r.denom().magnitude()) as i64)
}

/// Least m >= 1 with x^m ≡ 1 (mod q), for an odd prime q not dividing x.
///
/// q-1 is factored by trial division, which is comfortable for the desk-scale
/// primes this crate works with.
pub fn multiplicative_order(q: u64, x: &BigInt) -> Result<u64, PadicError> {
    check_prime(q)?;
    if q == 2 {
        return Err(PadicError::EvenPrime);
    }
    let r = x.mod_floor(&BigInt::from(q)).to_u64().expect("residue fits u64");
    if r == 0 {
        return Err(PadicError::DivisibleBase(q));
    }
    let mut order = q - 1;
    for (p, _) in factor_u64(q - 1) {
        while order % p == 0 && pow_mod(r, order / p, q) == 1 {
            order /= p;
        }
    }
    Ok(order)
}

fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, e: u32| out.push((p, e));
    let mut e = 0;
    while n % 2 == 0 {
        n /= 2;
        e += 1;
    }
    if e > 0 {
        push(2, e);
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            push(d, e);
        }
        d += 2;
    }
    if n > 1 {
        push(n, 1);
    }
    out
}

/// A q-adic valuation question about σ̃₋₁(x^a): prime q, base x != 0,
/// finite exponent a >= 1.
#[derive(Clone, Debug)]
pub struct ValuationQuery {
    q: u64,
    x: BigInt,
    a: u64,
}

impl ValuationQuery {
    pub fn new(q: u64, x: impl Into<BigInt>, a: u64) -> Result<Self, PadicError> {
        check_prime(q)?;
        let x = x.into();
        if x.is_zero() {
            return Err(PadicError::ZeroBase);
        }
        if a == 0 {
            return Err(PadicError::ZeroExponent);
        }
        Ok(ValuationQuery { q, x, a })
    }
}

/// v_q(σ̃₋₁(x^a)) by the closed-form case split for odd q; for q = 2 the
/// exact rational value is evaluated directly.
pub fn sigma_inv_valuation(query: &ValuationQuery) -> Result<i64, PadicError> {
    let ValuationQuery { q, x, a } = query;
    let (q, a) = (*q, *a);
    if *x == BigInt::from(-1) {
        // σ̃(x^a) vanishes for odd a; for even a the value is 1.
        return if a % 2 == 1 { Err(PadicError::ZeroValue) } else { Ok(0) };
    }
    if q == 2 {
        let v = factor_sigma_inv(x, Exponent::Finite(a))
            .into_finite()
            .expect("finite exponent gives finite value");
        return valuation(2, &v);
    }
    let qi = BigInt::from(q);
    if x.mod_floor(&qi).is_zero() {
        let vx = uint_valuation(q, x.magnitude()) as i64;
        return Ok(-(a as i64) * vx);
    }
    let order = multiplicative_order(q, x)?;
    if order == 1 {
        return Ok(uint_valuation(q, &BigUint::from(a + 1)) as i64);
    }
    if (a + 1) % order == 0 {
        // order | a+1 keeps this power small: order <= a+1.
        let root: BigInt = crate::factorization::int_pow(x, order) - 1;
        let v = uint_valuation(q, root.magnitude()) + uint_valuation(q, &BigUint::from(a + 1));
        return Ok(v as i64);
    }
    Ok(0)
}

/// Outcome of the 2-adic structure test on an odd factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EulerianReport {
    /// Exactly one exponent is odd, at `index`, and its base and exponent are
    /// both ≡ 1 (mod 4).
    Pass { index: usize },
    Fail(EulerianViolation),
}

impl EulerianReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, EulerianReport::Pass { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EulerianViolation {
    NoOddExponent,
    MultipleOddExponents(Vec<usize>),
    BaseNotOneMod4 { index: usize },
    ExponentNotOneMod4 { index: usize },
}

impl fmt::Display for EulerianReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EulerianReport::Pass { index } => write!(f, "pass (factor {})", index),
            EulerianReport::Fail(v) => write!(f, "fail: {}", v),
        }
    }
}

impl fmt::Display for EulerianViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EulerianViolation::NoOddExponent => f.write_str("no odd exponent"),
            EulerianViolation::MultipleOddExponents(idx) => {
                write!(f, "{} odd exponents (exactly one required)", idx.len())
            }
            EulerianViolation::BaseNotOneMod4 { index } => {
                write!(f, "base of factor {} is not 1 mod 4", index)
            }
            EulerianViolation::ExponentNotOneMod4 { index } => {
                write!(f, "exponent of factor {} is not 1 mod 4", index)
            }
        }
    }
}

/// Checks the exponent-parity structure every odd spoof perfect factorization
/// must have: exactly one odd exponent, whose base x and exponent a satisfy
/// x ≡ a ≡ 1 (mod 4). Factor indices refer to canonical order.
pub fn eulerian_check(f: &Factorization) -> Result<EulerianReport, PadicError> {
    if f.is_trivial() {
        return Err(PadicError::Trivial);
    }
    if !f.is_odd() {
        return Err(PadicError::NotOdd);
    }
    let mut odd_indices = Vec::new();
    for (i, factor) in f.factors().iter().enumerate() {
        let a = factor.exponent.finite().ok_or(PadicError::InfiniteExponent)?;
        if a % 2 == 1 {
            odd_indices.push(i);
        }
    }
    let index = match odd_indices.as_slice() {
        [] => return Ok(EulerianReport::Fail(EulerianViolation::NoOddExponent)),
        [i] => *i,
        _ => {
            return Ok(EulerianReport::Fail(EulerianViolation::MultipleOddExponents(odd_indices)))
        }
    };
    let factor = &f.factors()[index];
    let four = BigInt::from(4);
    if !factor.base.mod_floor(&four).is_one() {
        return Ok(EulerianReport::Fail(EulerianViolation::BaseNotOneMod4 { index }));
    }
    let a = factor.exponent.finite().expect("checked finite above");
    if a % 4 != 1 {
        return Ok(EulerianReport::Fail(EulerianViolation::ExponentNotOneMod4 { index }));
    }
    Ok(EulerianReport::Pass { index })
}

/// Read-only table of small primes shared by pruning calls.
pub struct PrimeTable {
    primes: Vec<u64>,
    bound: u64,
}

impl PrimeTable {
    pub const DEFAULT_BOUND: u64 = 1_000_000;

    pub fn new(bound: u64) -> Self {
        let bound = bound.max(3);
        let mut sieve = alloc::vec![true; bound as usize];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2usize;
        while i * i < bound as usize {
            if sieve[i] {
                let mut j = i * i;
                while j < bound as usize {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        let primes = sieve
            .iter()
            .enumerate()
            .filter_map(|(n, &p)| if p { Some(n as u64) } else { None })
            .collect();
        PrimeTable { primes, bound }
    }

    /// Odd prime factors of |n| below the table bound. Cofactors that are
    /// not fully factored are ignored.
    fn small_odd_prime_factors(&self, n: &BigInt, out: &mut Vec<u64>) {
        if n.is_zero() {
            return;
        }
        let mut rem = n.magnitude().clone();
        for &p in &self.primes {
            if let Some(small) = rem.to_u64() {
                // switch to machine arithmetic once the cofactor fits
                let mut small = small;
                for &p in self.primes.iter().skip_while(|&&q| q < p) {
                    if p * p > small {
                        break;
                    }
                    if small % p == 0 {
                        if p != 2 {
                            out.push(p);
                        }
                        while small % p == 0 {
                            small /= p;
                        }
                    }
                }
                if small > 1 && small < self.bound && small != 2 {
                    out.push(small);
                }
                return;
            }
            let pq = BigUint::from(p);
            if (&rem % &pq).is_zero() {
                if p != 2 {
                    out.push(p);
                }
                while (&rem % &pq).is_zero() {
                    rem /= &pq;
                }
            }
        }
    }
}

impl Default for PrimeTable {
    fn default() -> Self {
        PrimeTable::new(PrimeTable::DEFAULT_BOUND)
    }
}

/// Constraint on a base that may still appear (or change exponent) in a
/// completion of a search prefix.
#[derive(Clone, Debug)]
pub enum RemainingBase {
    /// Base already chosen, exponent only known to be >= `min_exponent`.
    Known { base: BigInt, min_exponent: u64 },
    /// Base not chosen yet; it may be divisible by any prime.
    Free,
}

/// Decides whether a fixed prefix can be discarded: returns `true` when some
/// odd prime q has v_q(σ̃₋₁(prefix)) > 0 that no admissible completion can
/// cancel. `false` means "cannot decide" — completeness of the search never
/// depends on this filter.
///
/// Negative q-adic contributions only come from factors with q | base, so a
/// positive prefix valuation is fatal once every remaining base is known and
/// coprime to q. Any `Free` slot defeats the argument.
pub fn padic_prune(
    prefix: &Factorization,
    remaining: &[RemainingBase],
    table: &PrimeTable,
) -> bool {
    Pruner::new(PrimeTable { primes: table.primes.clone(), bound: table.bound })
        .prune(prefix, remaining)
}

/// [`padic_prune`] with memoized per-factor prime candidates and valuations.
/// The same (base, exponent) pairs recur across thousands of search nodes,
/// so the caches remove nearly all trial-division work. Caching is
/// transparent: results are identical to the uncached function.
pub struct Pruner {
    table: PrimeTable,
    factor_primes: BTreeMap<BigInt, BTreeMap<u64, Vec<u64>>>,
    valuations: BTreeMap<BigInt, BTreeMap<(u64, u64), Option<i64>>>,
}

impl Pruner {
    pub fn new(table: PrimeTable) -> Self {
        Pruner { table, factor_primes: BTreeMap::new(), valuations: BTreeMap::new() }
    }

    fn candidate_primes(&mut self, base: &BigInt, exp: u64) -> &[u64] {
        if !self.factor_primes.get(base).is_some_and(|m| m.contains_key(&exp)) {
            let mut primes = Vec::new();
            self.table.small_odd_prime_factors(&factor_sigma_tilde(base, exp), &mut primes);
            self.factor_primes.entry(base.clone()).or_default().insert(exp, primes);
        }
        &self.factor_primes[base][&exp]
    }

    fn valuation(&mut self, q: u64, base: &BigInt, exp: u64) -> Option<i64> {
        if let Some(v) = self.valuations.get(base).and_then(|m| m.get(&(q, exp))) {
            return *v;
        }
        let query = ValuationQuery::new(q, base.clone(), exp).expect("valid query");
        let v = sigma_inv_valuation(&query).ok();
        self.valuations.entry(base.clone()).or_default().insert((q, exp), v);
        v
    }

    pub fn prune(&mut self, prefix: &Factorization, remaining: &[RemainingBase]) -> bool {
        if remaining.iter().any(|r| matches!(r, RemainingBase::Free)) {
            return false;
        }
        let opens: Vec<BigInt> = remaining
            .iter()
            .map(|r| match r {
                RemainingBase::Known { base, .. } => base.clone(),
                RemainingBase::Free => unreachable!("handled above"),
            })
            .collect();
        !self.must_divide(prefix, &opens).is_empty()
    }

    /// Primes q with v_q(σ̃₋₁(prefix)) > 0 that none of the `opens` bases can
    /// cancel. Every base adjoined to such a prefix (with no other slots
    /// left) must be divisible by all of them, or the branch is dead.
    pub fn must_divide(&mut self, prefix: &Factorization, opens: &[BigInt]) -> Vec<u64> {
        debug_assert!(!prefix.is_trivial() && !prefix.has_infinite_exponent());
        // Candidate primes: v_q(σ̃₋₁(prefix)) > 0 requires q | σ̃(x^a) for
        // some prefix factor.
        let mut candidates = Vec::new();
        for factor in prefix.factors() {
            let a = factor.exponent.finite().expect("finite prefix");
            candidates.extend_from_slice(self.candidate_primes(&factor.base, a));
        }
        candidates.sort_unstable();
        candidates.dedup();
        let mut out = Vec::new();
        'prime: for &q in &candidates {
            let mut v = 0i64;
            for factor in prefix.factors() {
                let a = factor.exponent.finite().expect("finite prefix");
                match self.valuation(q, &factor.base, a) {
                    Some(val) => v += val,
                    None => continue 'prime,
                }
            }
            if v <= 0 {
                continue;
            }
            let qi = BigInt::from(q);
            if !opens.iter().any(|base| base.mod_floor(&qi).is_zero()) {
                out.push(q);
            }
        }
        out
    }
}

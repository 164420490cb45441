//! Branch-and-bound enumeration of all nontrivial, odd, primitive spoof
//! perfect factorizations with at most k bases.
//!
//! Search nodes are partial factorizations. A node whose sandwich
//! `[L(S), U(S)]` lies strictly above 2 can only be repaired by a new
//! negative base, one strictly below 2 only by a new positive base, and in
//! both cases the candidate bases form a finite interval. The remaining
//! (indeterminate) nodes split on one open exponent over a finite range
//! `[b_i, b*]`, together with the new-base children of the node whose open
//! ranges are raised past `b*`. Every child adds a base or pins an exponent,
//! so chains have length at most 2k and the whole tree is finite.
//!
//! Two conventions keep the tree small without losing completeness:
//! new negative bases never exceed a previously adjoined negative base, new
//! positive bases are never below a previously adjoined positive one (each
//! multiset is built in one canonical order), and exponent fixings violating
//! the 2-adic structure of odd spoof perfect factorizations (at most one odd
//! exponent, on a base ≡ 1 mod 4 with exponent ≡ 1 mod 4) are dropped.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::bounds::{
    bounds_lu, case1_interval, case2_interval, BoundPair, ExponentRange, PartialFactor,
    PartialFactorization, RangeCache, RawBoundPair,
};
use crate::factorization::{factor_sigma_inv, Exponent, Factor, Factorization};
use crate::padic::{eulerian_check, PrimeTable, Pruner, RemainingBase};
use crate::rational::ExtRational;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Maximum number of bases k.
    pub max_bases: usize,
    /// Keep only primitive factorizations (checked at emission time).
    pub require_primitive: bool,
    /// Enable the q-adic valuation pruning filter. Never affects the output
    /// set, only the amount of work.
    pub use_padic_prune: bool,
}

impl SearchConfig {
    pub fn new(max_bases: usize) -> Self {
        assert!(max_bases >= 1);
        SearchConfig { max_bases, require_primitive: true, use_padic_prune: true }
    }
}

/// A frontier entry: a partial factorization and the number of improvement
/// steps that produced it (bounded by 2k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchNode {
    pub partial: PartialFactorization,
    pub depth: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Abundant,
    Deficient,
    Indeterminate,
    Complete,
}

pub fn classify(s: &PartialFactorization) -> Classification {
    classification_of(&bounds_lu(s))
}

fn classification_of(pair: &BoundPair) -> Classification {
    let two = BigRational::from_integer(BigInt::from(2));
    if pair.lower > two {
        Classification::Abundant
    } else if pair.upper < ExtRational::Finite(two) {
        Classification::Deficient
    } else if ExtRational::Finite(pair.lower.clone()) == pair.upper {
        // all exponents fixed and the value is sandwiched at exactly 2
        Classification::Complete
    } else {
        Classification::Indeterminate
    }
}

fn classification_of_raw(pair: &RawBoundPair) -> Classification {
    if pair.lower_above_2() {
        Classification::Abundant
    } else if pair.upper_below_2() {
        Classification::Deficient
    } else if pair.degenerate() {
        Classification::Complete
    } else {
        Classification::Indeterminate
    }
}

/// Memoization shared across node expansions: per-factor σ̃₋₁ ranges and the
/// pruning filter's candidate primes and valuations. Purely an accelerator;
/// every cached answer is identical to the uncached computation.
pub struct SearchContext {
    ranges: RangeCache,
    pruner: Pruner,
}

impl SearchContext {
    pub fn new() -> Self {
        SearchContext { ranges: RangeCache::new(), pruner: Pruner::new(PrimeTable::default()) }
    }
}

impl Default for SearchContext {
    fn default() -> Self {
        SearchContext::new()
    }
}

/// Result of expanding one node.
#[derive(Clone, Debug)]
pub enum Expansion {
    /// The node is a spoof perfect factorization (σ̃₋₁ = 2 exactly).
    Complete(Factorization),
    /// Zero or more improved nodes.
    Children(Vec<SearchNode>),
}

/// Exponent-parity admissibility: a partial factorization none of whose
/// completions can be spoof perfect is dropped as soon as it is formed.
fn admissible(s: &PartialFactorization) -> bool {
    let four = BigInt::from(4);
    let mut seen_odd = false;
    for e in s.entries() {
        if let ExponentRange::Fixed(b) = e.range {
            if b % 2 == 1 {
                if seen_odd || b % 4 != 1 || !e.base.mod_floor(&four).is_one() {
                    return false;
                }
                seen_odd = true;
            }
        }
    }
    true
}

fn prunable(s: &PartialFactorization, k: usize, pruner: &mut Pruner) -> bool {
    if s.len() < k {
        // a free base slot can absorb any prime
        return false;
    }
    let mut fixed = Vec::new();
    let mut remaining = Vec::new();
    for e in s.entries() {
        match e.range {
            ExponentRange::Fixed(b) => fixed.push(Factor::finite(e.base.clone(), b)),
            ExponentRange::AtLeast(lo) => {
                remaining.push(RemainingBase::Known { base: e.base.clone(), min_exponent: lo })
            }
        }
    }
    if fixed.is_empty() {
        return false;
    }
    let prefix = Factorization::new(fixed).expect("nonempty fixed prefix");
    pruner.prune(&prefix, &remaining)
}

/// When the new base fills the last slot and the pruning filter is on, every
/// surviving candidate must be divisible by the product of the prefix's
/// uncancellable primes; stepping the interval by that modulus is the same
/// filter applied before construction instead of after.
fn adjoin_modulus(
    s: &PartialFactorization,
    k: usize,
    config: &SearchConfig,
    pruner: &mut Pruner,
) -> Option<BigInt> {
    if !config.use_padic_prune || s.len() + 1 != k {
        return None;
    }
    let mut fixed = Vec::new();
    let mut opens = Vec::new();
    for e in s.entries() {
        match e.range {
            ExponentRange::Fixed(b) => fixed.push(Factor::finite(e.base.clone(), b)),
            ExponentRange::AtLeast(_) => opens.push(e.base.clone()),
        }
    }
    if fixed.is_empty() {
        return None;
    }
    let prefix = Factorization::new(fixed).expect("nonempty fixed prefix");
    let primes = pruner.must_divide(&prefix, &opens);
    if primes.is_empty() {
        None
    } else {
        Some(primes.iter().fold(BigInt::one(), |acc, &q| acc * q))
    }
}

/// Pushes a child node for every odd y in `[min, max]`, restricted to
/// multiples of `modulus` when given (the modulus is odd, so y = modulus * t
/// with t odd).
fn adjoin_bases(
    s: &PartialFactorization,
    min: &BigInt,
    max: &BigInt,
    modulus: Option<&BigInt>,
    depth: u32,
    out: &mut Vec<SearchNode>,
) {
    let mut push = |y: BigInt| {
        let child = s
            .push(PartialFactor { base: y, range: ExponentRange::AtLeast(1) })
            .expect("odd nontrivial base");
        out.push(SearchNode { partial: child, depth: depth + 1 });
    };
    match modulus {
        None => {
            let mut y = min.clone();
            while y <= *max {
                if y.is_odd() {
                    push(y.clone());
                }
                y += 1;
            }
        }
        Some(step) => {
            debug_assert!(step.is_odd() && step.is_positive());
            let mut t = min.div_ceil(step);
            let hi = max.div_floor(step);
            while t <= hi {
                if t.is_odd() {
                    push(&t * step);
                }
                t += 1;
            }
        }
    }
}

fn adjoin_negative(
    s: &PartialFactorization,
    lower: &BigRational,
    k: usize,
    depth: u32,
    config: &SearchConfig,
    pruner: &mut Pruner,
    out: &mut Vec<SearchNode>,
) {
    let interval = case1_interval(lower, k, s.len()).expect("abundant with room");
    if interval.is_empty() {
        return;
    }
    // new negative bases may not exceed previously adjoined ones
    let cap = s.entries().iter().map(|e| &e.base).filter(|b| b.is_negative()).min();
    let max = match cap {
        Some(bound) if *bound < interval.max => bound.clone(),
        _ => interval.max.clone(),
    };
    let modulus = adjoin_modulus(s, k, config, pruner);
    adjoin_bases(s, &interval.min, &max, modulus.as_ref(), depth, out);
}

fn adjoin_positive(
    s: &PartialFactorization,
    upper: &BigRational,
    k: usize,
    depth: u32,
    config: &SearchConfig,
    pruner: &mut Pruner,
    out: &mut Vec<SearchNode>,
) {
    let interval = case2_interval(upper, k, s.len()).expect("deficient with room");
    // new positive bases may not be below previously adjoined ones
    let floor = s.entries().iter().map(|e| &e.base).filter(|b| b.is_positive()).max();
    let min = match floor {
        Some(bound) if *bound > interval.min => bound.clone(),
        _ => interval.min.clone(),
    };
    let modulus = adjoin_modulus(s, k, config, pruner);
    adjoin_bases(s, &min, &interval.max, modulus.as_ref(), depth, out);
}

/// Expands one node: emits the completed factorization, or the finite set of
/// improvements dictated by its classification.
pub fn expand(node: &SearchNode, config: &SearchConfig, ctx: &mut SearchContext) -> Expansion {
    let s = &node.partial;
    let k = config.max_bases;
    let m = s.len();
    debug_assert!(node.depth as usize <= 2 * k, "improvement chain exceeded 2k");
    let mut children = Vec::new();
    let pair = ctx.ranges.raw_bounds(s, 0);
    match classification_of_raw(&pair) {
        Classification::Complete => {
            let factors = s
                .entries()
                .iter()
                .map(|e| match e.range {
                    ExponentRange::Fixed(b) => Factor::finite(e.base.clone(), b),
                    ExponentRange::AtLeast(_) => unreachable!("complete nodes are fully fixed"),
                })
                .collect();
            let f = Factorization::new(factors).expect("nonempty");
            debug_assert!(f.is_spoof_perfect());
            return Expansion::Complete(f);
        }
        Classification::Abundant => {
            if m < k {
                let lower = pair.lower.to_rational();
                adjoin_negative(s, &lower, k, node.depth, config, &mut ctx.pruner, &mut children);
            }
        }
        Classification::Deficient => {
            if m < k {
                let upper =
                    pair.upper_rational().into_finite().expect("deficient bound is finite");
                adjoin_positive(s, &upper, k, node.depth, config, &mut ctx.pruner, &mut children);
            }
        }
        Classification::Indeterminate => {
            let threshold = ctx.ranges.case3_threshold(s).expect("indeterminate node");
            // (a) pin one open exponent to a value in [b_i, threshold].
            // Children partition the completions by the least open entry
            // whose exponent is <= threshold: earlier open entries are
            // raised past it, so no completion is reachable through two
            // different children.
            for (i, e) in s.entries().iter().enumerate() {
                if let ExponentRange::AtLeast(lo) = e.range {
                    for b in lo..=threshold {
                        let mut entries = s.entries().to_vec();
                        entries[i].range = ExponentRange::Fixed(b);
                        for earlier in entries.iter_mut().take(i) {
                            if let ExponentRange::AtLeast(lo) = earlier.range {
                                earlier.range = ExponentRange::AtLeast(lo.max(threshold + 1));
                            }
                        }
                        let child =
                            PartialFactorization::new(entries).expect("validated entries");
                        if !admissible(&child) {
                            continue;
                        }
                        if config.use_padic_prune && prunable(&child, k, &mut ctx.pruner) {
                            continue;
                        }
                        children.push(SearchNode { partial: child, depth: node.depth + 1 });
                    }
                }
            }
            // (b) all open exponents above the threshold: the raised node is
            // out of balance and must take a new base
            if m < k {
                let raised = s.raise_open_lower_bounds(threshold + 1);
                let pair = ctx.ranges.raw_bounds(&raised, 0);
                match classification_of_raw(&pair) {
                    Classification::Abundant => {
                        let lower = pair.lower.to_rational();
                        adjoin_negative(&raised, &lower, k, node.depth, config, &mut ctx.pruner, &mut children)
                    }
                    Classification::Deficient => {
                        let upper =
                            pair.upper_rational().into_finite().expect("deficient bound is finite");
                        adjoin_positive(&raised, &upper, k, node.depth, config, &mut ctx.pruner, &mut children)
                    }
                    other => unreachable!("raised past threshold must be decisive, got {:?}", other),
                }
            }
        }
    }
    // Adjoined children were already filtered by the must-divide modulus in
    // adjoin_bases, which is the same test the pruner would apply; only the
    // exponent fixings above change the fixed prefix and need a fresh check.
    Expansion::Children(children)
}

/// Roots of the search: every odd spoof perfect factorization has a positive
/// base (negative factors have σ̃₋₁ < 1), and its smallest positive base y
/// satisfies `(y/(y-1))^k >= 2`. Treating the empty prefix as deficient with
/// U = 1 yields exactly that interval.
pub fn seeds(config: &SearchConfig) -> Vec<SearchNode> {
    let one = BigRational::from_integer(BigInt::one());
    let interval = case2_interval(&one, config.max_bases, 0).expect("U=1 is deficient");
    let mut out = Vec::new();
    let mut y = interval.min.clone();
    while y <= interval.max {
        if y.is_odd() {
            let partial = PartialFactorization::new(alloc::vec![PartialFactor {
                base: y.clone(),
                range: ExponentRange::AtLeast(1),
            }])
            .expect("odd positive base");
            out.push(SearchNode { partial, depth: 1 });
        }
        y += 1;
    }
    out
}

/// Emission filter applied to completed factorizations.
pub fn accept_result(f: &Factorization, config: &SearchConfig) -> bool {
    debug_assert!(f.is_spoof_perfect() && !f.is_trivial() && f.is_odd());
    debug_assert!(matches!(eulerian_check(f).map(|r| r.is_pass()), Ok(true)));
    if config.require_primitive {
        f.is_primitive().unwrap_or(false)
    } else {
        true
    }
}

/// Runs the whole search single-threaded and returns the results in
/// canonical sorted order, each exactly once.
pub fn enumerate(config: &SearchConfig) -> Vec<Factorization> {
    let mut ctx = SearchContext::new();
    let mut stack = seeds(config);
    let mut results = BTreeSet::new();
    while let Some(node) = stack.pop() {
        match expand(&node, config, &mut ctx) {
            Expansion::Complete(f) => {
                if accept_result(&f, config) {
                    results.insert(f);
                }
            }
            Expansion::Children(children) => stack.extend(children),
        }
    }
    results.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Any,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteForceError {
    /// The candidate multiset count exceeds the 10^9 guard.
    TooManyCandidates,
}

impl core::fmt::Display for BruteForceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BruteForceError::TooManyCandidates => {
                f.write_str("brute force space exceeds the 10^9 candidate guard")
            }
        }
    }
}

const BRUTE_FORCE_GUARD: u128 = 1_000_000_000;

/// Independent oracle: enumerates every nontrivial spoof perfect
/// factorization with at most `max_factors` factors, bases in
/// `[-base_bound, base_bound] \ {-1, 0}`, and exponents in `[1, exp_bound]`,
/// by exhausting all multisets (with exact-interval pruning on the partial
/// products). Shares no logic with the branch-and-bound search.
pub fn brute_force(
    base_bound: u64,
    exp_bound: u64,
    max_factors: usize,
    parity: Parity,
) -> Result<Vec<Factorization>, BruteForceError> {
    if base_bound > u32::MAX as u64 {
        return Err(BruteForceError::TooManyCandidates);
    }
    let lo = -(base_bound as i64);
    let hi = base_bound as i64;
    let keep = |x: i64| x != 0 && x != -1 && !(matches!(parity, Parity::Odd) && x % 2 == 0);
    let base_count = (lo..=hi).filter(|&x| keep(x)).count() as u128;
    guard_candidates(base_count * exp_bound as u128, max_factors)?;
    let mut grid: Vec<(BigInt, u64, BigRational)> = Vec::new();
    for x in lo..=hi {
        if !keep(x) {
            continue;
        }
        let base = BigInt::from(x);
        for a in 1..=exp_bound {
            let v = factor_sigma_inv(&base, Exponent::Finite(a))
                .into_finite()
                .expect("finite exponent");
            grid.push((base.clone(), a, v));
        }
    }
    // value-descending order makes the partial-product bounds monotone in
    // the scan position
    grid.sort_by(|a, b| b.2.cmp(&a.2));
    let global_min = match grid.iter().map(|g| &g.2).min() {
        Some(v) => v.clone(),
        None => return Ok(Vec::new()),
    };
    let two = BigRational::from_integer(BigInt::from(2));
    let one = BigRational::from_integer(BigInt::one());
    let mut chosen: Vec<usize> = Vec::new();
    let mut results: Vec<Factorization> = Vec::new();

    fn dfs(
        grid: &[(BigInt, u64, BigRational)],
        global_min: &BigRational,
        two: &BigRational,
        one: &BigRational,
        max_factors: usize,
        start: usize,
        product: BigRational,
        chosen: &mut Vec<usize>,
        results: &mut Vec<Factorization>,
    ) {
        if !chosen.is_empty() && product == *two {
            let factors =
                chosen.iter().map(|&j| Factor::finite(grid[j].0.clone(), grid[j].1)).collect();
            results.push(Factorization::new(factors).expect("nonempty"));
        }
        if chosen.len() == max_factors {
            return;
        }
        let slots_after = (max_factors - chosen.len() - 1) as u64;
        for j in start..grid.len() {
            let v = &grid[j].2;
            let with = &product * v;
            // largest reachable completion: remaining picks are <= v
            let max_reach = if *v > *one {
                &with * pow(v, slots_after)
            } else {
                with.clone()
            };
            if max_reach < *two {
                // later grid entries only shrink this; stop scanning
                break;
            }
            // smallest reachable completion: remaining picks are >= global min
            let min_reach = if *global_min < *one {
                &with * pow(global_min, slots_after)
            } else {
                with.clone()
            };
            if min_reach > *two {
                continue;
            }
            chosen.push(j);
            dfs(grid, global_min, two, one, max_factors, j, with, chosen, results);
            chosen.pop();
        }
    }

    fn pow(r: &BigRational, e: u64) -> BigRational {
        r.pow(e as i32)
    }

    dfs(
        &grid,
        &global_min,
        &two,
        &one,
        max_factors,
        0,
        BigRational::from_integer(BigInt::one()),
        &mut chosen,
        &mut results,
    );
    results.sort();
    Ok(results)
}

fn guard_candidates(grid: u128, max_factors: usize) -> Result<(), BruteForceError> {
    // sum over sizes s of C(grid + s - 1, s)
    let mut total: u128 = 0;
    for s in 1..=max_factors as u128 {
        let mut binom: u128 = 1;
        for i in 0..s {
            binom = binom
                .checked_mul(grid + s - 1 - i)
                .ok_or(BruteForceError::TooManyCandidates)?
                / (i + 1);
            if binom > BRUTE_FORCE_GUARD {
                return Err(BruteForceError::TooManyCandidates);
            }
        }
        total = total.checked_add(binom).ok_or(BruteForceError::TooManyCandidates)?;
        if total > BRUTE_FORCE_GUARD {
            return Err(BruteForceError::TooManyCandidates);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::parse;

    fn pf(triples: &[(i64, u64, Option<u64>)]) -> PartialFactorization {
        PartialFactorization::from_triples(triples).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&pf(&[(1, 2, Some(2))])), Classification::Abundant);
        assert_eq!(classify(&pf(&[(3, 2, Some(2))])), Classification::Deficient);
        assert_eq!(classify(&pf(&[(1, 1, Some(1))])), Classification::Complete);
        assert_eq!(classify(&pf(&[(1, 1, None)])), Classification::Indeterminate);
    }

    #[test]
    fn children_of_abundant_fixed_one_squared() {
        let config = SearchConfig::new(2);
        let mut ctx = SearchContext::new();
        let node = SearchNode { partial: pf(&[(1, 2, Some(2))]), depth: 2 };
        match expand(&node, &config, &mut ctx) {
            Expansion::Children(children) => {
                assert_eq!(children.len(), 1);
                assert_eq!(children[0].partial, pf(&[(1, 2, Some(2)), (-3, 1, None)]));
                assert_eq!(children[0].depth, 3);
            }
            other => panic!("expected children, got {:?}", other),
        }
    }

    #[test]
    fn children_of_indeterminate_seed() {
        // expansion of 1^[1,inf] at k = 1: pin to 1 (complete) or 2 (dead
        // abundant); the raised node has no room for a new base. The pruner
        // would drop the dead child, so turn it off to see the raw shape.
        let mut config = SearchConfig::new(1);
        config.use_padic_prune = false;
        let mut ctx = SearchContext::new();
        let node = SearchNode { partial: pf(&[(1, 1, None)]), depth: 1 };
        match expand(&node, &config, &mut ctx) {
            Expansion::Children(children) => {
                let got: Vec<_> = children.iter().map(|c| c.partial.clone()).collect();
                assert_eq!(got, vec![pf(&[(1, 1, Some(1))]), pf(&[(1, 2, Some(2))])]);
            }
            other => panic!("expected children, got {:?}", other),
        }
    }

    #[test]
    fn deficient_nodes_respect_positive_base_ordering() {
        // case2_interval(13/9, 2, 1) = [1, 3], but new positive bases may
        // not be below the already-adjoined 3
        let mut config = SearchConfig::new(2);
        config.use_padic_prune = false;
        let mut ctx = SearchContext::new();
        let node = SearchNode { partial: pf(&[(3, 2, Some(2))]), depth: 2 };
        match expand(&node, &config, &mut ctx) {
            Expansion::Children(children) => {
                let got: Vec<_> = children.iter().map(|c| c.partial.clone()).collect();
                assert_eq!(got, vec![pf(&[(3, 2, Some(2)), (3, 1, None)])]);
            }
            other => panic!("expected children, got {:?}", other),
        }
    }

    #[test]
    fn seeds_for_small_k() {
        assert_eq!(seeds(&SearchConfig::new(1)).len(), 1);
        let k3: Vec<_> = seeds(&SearchConfig::new(3))
            .into_iter()
            .map(|n| n.partial.entries()[0].base.clone())
            .collect();
        assert_eq!(k3, vec![BigInt::from(1), BigInt::from(3)]);
    }

    #[test]
    fn enumerate_k1_and_k2() {
        let mut config = SearchConfig::new(1);
        config.use_padic_prune = false;
        assert_eq!(enumerate(&config), vec![parse("1^1").unwrap()]);
        let config = SearchConfig::new(2);
        assert_eq!(
            enumerate(&config),
            vec![parse("1^1").unwrap(), parse("1^2 * (-3)^1").unwrap()]
        );
    }

    #[test]
    fn enumerate_k3_matches_catalog() {
        let config = SearchConfig::new(3);
        let expected = ["1^1", "1^2 * (-3)^1", "1^2 * (-3)^2 * (-7)^1"];
        let got = enumerate(&config);
        let expected: Vec<_> = expected.iter().map(|t| parse(t).unwrap()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn brute_force_examples() {
        let all = brute_force(3, 3, 2, Parity::Any).unwrap();
        assert!(all.contains(&parse("(-3)^1 * 1^2").unwrap()));

        let all = brute_force(5, 5, 3, Parity::Any).unwrap();
        assert!(all.contains(&parse("3^1 * 4^1 * 5^1").unwrap()));

        let all = brute_force(7, 2, 1, Parity::Any).unwrap();
        assert_eq!(all, vec![parse("1^1").unwrap()]);

        assert_eq!(
            brute_force(10_000, 50, 12, Parity::Any),
            Err(BruteForceError::TooManyCandidates)
        );
    }
}

//! Soundness and tightness of the interval machinery.

use num_bigint::BigInt;
use num_rational::BigRational;
use spoof_core::bounds::{
    bounds_lu, case1_interval, case2_interval, ExponentRange, PartialFactor,
    PartialFactorization,
};
use spoof_core::{Exponent, ExtRational, Factor, Factorization};

fn sigma_inv_power(x: i64, exp: Exponent) -> ExtRational {
    Factorization::new(vec![Factor::new(x, exp)]).unwrap().sigma_tilde_inv().unwrap()
}

fn mul(a: &ExtRational, b: &ExtRational) -> ExtRational {
    a.clone() * b.clone()
}

const ODD_BASES: [i64; 15] = [-15, -13, -11, -9, -7, -5, -3, 1, 3, 5, 7, 9, 11, 13, 15];

fn all_triples() -> Vec<(i64, u64, Option<u64>)> {
    let mut out = Vec::new();
    for &x in &ODD_BASES {
        for b in 1..=6u64 {
            out.push((x, b, Some(b)));
            out.push((x, b, None));
        }
    }
    out
}

/// Exponents admissible for one triple: everything in [b, 12], plus infinity
/// when the range is open.
fn assignments(triple: (i64, u64, Option<u64>)) -> Vec<Exponent> {
    let (_, b, c) = triple;
    match c {
        Some(c) => vec![Exponent::Finite(c)],
        None => {
            let mut out: Vec<Exponent> = (b..=12).map(Exponent::Finite).collect();
            out.push(Exponent::Infinite);
            out
        }
    }
}

fn sandwich_holds(lower: &BigRational, upper: &ExtRational, value: &ExtRational) -> bool {
    ExtRational::Finite(lower.clone()) <= *value && *value <= *upper
}

#[test]
fn bounds_sandwich_every_completion_exhaustively() {
    let triples = all_triples();
    // single triples: sandwich and tightness
    for &t in &triples {
        let s = PartialFactorization::from_triples(&[t]).unwrap();
        let pair = bounds_lu(&s);
        let values: Vec<ExtRational> =
            assignments(t).into_iter().map(|e| sigma_inv_power(t.0, e)).collect();
        for v in &values {
            assert!(sandwich_holds(&pair.lower, &pair.upper, v), "t={:?} v={}", t, v);
        }
        let min = values.iter().min().unwrap();
        let max = values.iter().max().unwrap();
        assert_eq!(ExtRational::Finite(pair.lower.clone()), *min, "lower not attained at {:?}", t);
        assert_eq!(pair.upper, *max, "upper not attained at {:?}", t);
    }
    // pairs: sandwich and tightness via products of per-factor assignments
    for &t1 in &triples {
        let values1: Vec<ExtRational> =
            assignments(t1).into_iter().map(|e| sigma_inv_power(t1.0, e)).collect();
        for &t2 in &triples {
            let s = PartialFactorization::from_triples(&[t1, t2]).unwrap();
            let pair = bounds_lu(&s);
            let values2: Vec<ExtRational> =
                assignments(t2).into_iter().map(|e| sigma_inv_power(t2.0, e)).collect();
            let mut min: Option<ExtRational> = None;
            let mut max: Option<ExtRational> = None;
            for v1 in &values1 {
                for v2 in &values2 {
                    let v = mul(v1, v2);
                    assert!(
                        sandwich_holds(&pair.lower, &pair.upper, &v),
                        "t1={:?} t2={:?} v={}",
                        t1,
                        t2,
                        v
                    );
                    min = Some(match min.take() {
                        Some(m) if m <= v => m,
                        _ => v.clone(),
                    });
                    max = Some(match max.take() {
                        Some(m) if m >= v => m,
                        _ => v,
                    });
                }
            }
            assert_eq!(ExtRational::Finite(pair.lower.clone()), min.unwrap(), "{:?} {:?}", t1, t2);
            assert_eq!(pair.upper, max.unwrap(), "{:?} {:?}", t1, t2);
        }
    }
}

#[test]
fn positive_bases_are_monotone_decreasing() {
    // sigma_inv(x^a) >= sigma_inv(y^b) for 1 <= x < y, equality only at
    // (y, a, b) = (x+1, 1, inf)
    let exps: Vec<Exponent> =
        (1..=20).map(Exponent::Finite).chain([Exponent::Infinite]).collect();
    for x in 1..=59i64 {
        for y in (x + 1)..=60 {
            for &a in &exps {
                let va = sigma_inv_power(x, a);
                for &b in &exps {
                    let vb = sigma_inv_power(y, b);
                    assert!(va >= vb, "x={} y={} a={:?} b={:?}", x, y, a, b);
                    if va == vb {
                        assert_eq!(
                            (y, a, b),
                            (x + 1, Exponent::Finite(1), Exponent::Infinite),
                            "unexpected equality"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn negative_bases_are_monotone_with_four_exceptions() {
    // for y < x <= -2: sigma_inv(x^a) < sigma_inv(y^b), except
    //   (a even,  y = x-1, b = 1)      : >
    //   (a = inf, y = x-1, b = 1)      : =
    //   (x=-2, a=2, y=-3, b odd finite): >
    //   (x=-2, a=2, y=-4, b=1)         : =
    // The last two patterns compose with sigma_inv(y^inf) = sigma_inv((y-1)^1)
    // to one more equality inside the tested grid:
    //   (x=-2, a=2, y=-3, b=inf)       : =   (both sides are 3/4)
    let exps: Vec<Exponent> =
        (1..=20).map(Exponent::Finite).chain([Exponent::Infinite]).collect();
    for x in -14..=-2i64 {
        for y in -15..x {
            for &a in &exps {
                let va = sigma_inv_power(x, a);
                for &b in &exps {
                    let vb = sigma_inv_power(y, b);
                    let exception_even = matches!(a, Exponent::Finite(n) if n % 2 == 0)
                        && y == x - 1
                        && b == Exponent::Finite(1);
                    let exception_inf =
                        a == Exponent::Infinite && y == x - 1 && b == Exponent::Finite(1);
                    let exception_neg2_neg3 = x == -2
                        && a == Exponent::Finite(2)
                        && y == -3
                        && matches!(b, Exponent::Finite(n) if n % 2 == 1);
                    let exception_neg2_neg4 =
                        x == -2 && a == Exponent::Finite(2) && y == -4 && b == Exponent::Finite(1);
                    let exception_composed =
                        x == -2 && a == Exponent::Finite(2) && y == -3 && b == Exponent::Infinite;
                    if exception_inf || exception_neg2_neg4 || exception_composed {
                        assert_eq!(va, vb, "x={} y={} a={:?} b={:?}", x, y, a, b);
                    } else if exception_even || exception_neg2_neg3 {
                        assert!(va > vb, "x={} y={} a={:?} b={:?}", x, y, a, b);
                    } else {
                        assert!(va < vb, "x={} y={} a={:?} b={:?}", x, y, a, b);
                    }
                }
            }
        }
    }
}

#[test]
fn adjoined_bases_lie_in_the_case_intervals() {
    // walk the whole k = 4 tree and re-check every adjoined base against the
    // public interval functions
    use spoof_core::search::{classify, expand, seeds, Classification, Expansion, SearchConfig, SearchContext};
    let config = SearchConfig::new(4);
    let mut ctx = SearchContext::new();
    let mut stack = seeds(&config);
    let mut adjunctions = 0u64;
    while let Some(node) = stack.pop() {
        if let Expansion::Children(children) = expand(&node, &config, &mut ctx) {
            for child in children {
                if child.partial.len() == node.partial.len() + 1 {
                    // the parent of an adjoin child is the node with its open
                    // ranges raised to match (a no-op unless case 3 raised them)
                    let new = child.partial.entries().last().unwrap();
                    let parent_entries = child.partial.entries()[..child.partial.len() - 1].to_vec();
                    let parent = PartialFactorization::new(parent_entries).unwrap();
                    let pair = bounds_lu(&parent);
                    let interval = match classify(&parent) {
                        Classification::Abundant => {
                            case1_interval(&pair.lower, 4, parent.len()).unwrap()
                        }
                        Classification::Deficient => case2_interval(
                            pair.upper.as_finite().unwrap(),
                            4,
                            parent.len(),
                        )
                        .unwrap(),
                        other => panic!("adjoin from a {:?} node", other),
                    };
                    assert!(
                        interval.contains(&new.base),
                        "base {} outside interval [{}, {}]",
                        new.base,
                        interval.min,
                        interval.max
                    );
                    adjunctions += 1;
                }
                stack.push(child);
            }
        }
    }
    assert!(adjunctions > 100, "expected to see real adjunctions, got {}", adjunctions);
}

#[test]
fn base_one_open_range_gives_infinite_upper_bound() {
    let s = PartialFactorization::new(vec![PartialFactor {
        base: BigInt::from(1),
        range: ExponentRange::AtLeast(2),
    }])
    .unwrap();
    let pair = bounds_lu(&s);
    assert_eq!(pair.lower, BigRational::new(BigInt::from(3), BigInt::from(1)));
    assert_eq!(pair.upper, ExtRational::Infinity);
}

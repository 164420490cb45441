//! Structural properties of σ̃ and σ̃₋₁.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use spoof_core::factorization::parse;
use spoof_core::{Exponent, ExtRational, Factor, Factorization};

fn random_nontrivial(rng: &mut StdRng, allow_infinite: bool) -> Factorization {
    let len = rng.gen_range(1..=5);
    let factors = (0..len)
        .map(|_| {
            let base = loop {
                let b: i64 = rng.gen_range(-1_000_000..=1_000_000);
                if b != 0 && b != -1 {
                    break b;
                }
            };
            let exponent = if allow_infinite && base != 1 && rng.gen_bool(0.15) {
                Exponent::Infinite
            } else {
                Exponent::Finite(rng.gen_range(1..=50))
            };
            Factor::new(base, exponent)
        })
        .collect();
    Factorization::new(factors).unwrap()
}

#[test]
fn sigma_inv_is_multiplicative_over_concatenation() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    for _ in 0..1000 {
        let f = random_nontrivial(&mut rng, true);
        let g = random_nontrivial(&mut rng, true);
        let combined = f.concat(&g).sigma_tilde_inv().unwrap();
        let product = f.sigma_tilde_inv().unwrap() * g.sigma_tilde_inv().unwrap();
        assert_eq!(combined, product, "f = {}, g = {}", f, g);
    }
}

#[test]
fn sigma_inv_agrees_with_sigma_over_product_value() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for _ in 0..500 {
        let f = random_nontrivial(&mut rng, false);
        let direct = f.sigma_tilde_inv().unwrap();
        let quotient =
            BigRational::new(f.sigma_tilde().unwrap(), f.product_value().unwrap());
        assert_eq!(direct, ExtRational::Finite(quotient), "f = {}", f);
    }
}

#[test]
fn sigma_vanishes_exactly_on_odd_minus_one_exponents() {
    // all single factors and pairs with bases in [-5, 5], exponents in [1, 6]
    let bases: Vec<i64> = (-5..=5).collect();
    let exps: Vec<u64> = (1..=6).collect();
    let mut singles = Vec::new();
    for &x in &bases {
        for &a in &exps {
            singles.push((x, a));
        }
    }
    let vanishes = |f: &Factorization| {
        f.factors()
            .iter()
            .any(|factor| {
                factor.base == BigInt::from(-1)
                    && matches!(factor.exponent.finite(), Some(a) if a % 2 == 1)
            })
    };
    for &(x, a) in &singles {
        let f = Factorization::from_pairs(&[(x, a)]).unwrap();
        assert_eq!(f.sigma_tilde().unwrap().is_zero(), vanishes(&f), "f = {}", f);
    }
    for &(x, a) in &singles {
        for &(y, b) in &singles {
            let f = Factorization::from_pairs(&[(x, a), (y, b)]).unwrap();
            assert_eq!(f.sigma_tilde().unwrap().is_zero(), vanishes(&f), "f = {}", f);
        }
    }
}

#[test]
fn one_to_the_one_is_the_only_single_base_spoof() {
    let mut found = Vec::new();
    for x in -50..=50i64 {
        if x == 0 {
            continue;
        }
        for a in 1..=30u64 {
            let f = Factorization::from_pairs(&[(x, a)]).unwrap();
            if f.is_spoof_perfect() {
                found.push(f);
            }
        }
    }
    assert_eq!(found, vec![parse("1^1").unwrap()]);
}

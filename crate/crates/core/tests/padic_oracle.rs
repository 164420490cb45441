//! The closed-form valuation of σ̃₋₁(x^a) against direct evaluation.

use num_bigint::BigInt;
use spoof_core::factorization::parse;
use spoof_core::padic::{
    multiplicative_order, sigma_inv_valuation, valuation, ValuationQuery,
};
use spoof_core::{Exponent, Factor, Factorization};

const ODD_PRIMES: [u64; 25] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101,
];

fn sigma_inv_of_power(x: i64, a: u64) -> num_rational::BigRational {
    Factorization::new(vec![Factor::new(x, Exponent::Finite(a))])
        .unwrap()
        .sigma_tilde_inv()
        .unwrap()
        .into_finite()
        .unwrap()
}

#[test]
fn closed_form_matches_direct_valuation_everywhere() {
    let mut checked = 0u64;
    for &q in &ODD_PRIMES {
        for x in -50..=50i64 {
            if x == 0 || x == -1 {
                continue;
            }
            for a in 1..=40u64 {
                let query = ValuationQuery::new(q, x, a).unwrap();
                let formula = sigma_inv_valuation(&query).unwrap();
                let direct = valuation(q, &sigma_inv_of_power(x, a)).unwrap();
                assert_eq!(formula, direct, "q={} x={} a={}", q, x, a);
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 25 * 99 * 40);
}

#[test]
fn worked_elimination_instance() {
    // sigma_inv((-2)^8) = 171/256 has 3-adic valuation 2 and 19-adic
    // valuation 1
    let v = sigma_inv_of_power(-2, 8);
    assert_eq!(valuation(3, &v), Ok(2));
    assert_eq!(valuation(19, &v), Ok(1));
    let q3 = ValuationQuery::new(3, -2, 8).unwrap();
    assert_eq!(sigma_inv_valuation(&q3), Ok(2));
    let q19 = ValuationQuery::new(19, -2, 8).unwrap();
    assert_eq!(sigma_inv_valuation(&q19), Ok(1));
}

#[test]
fn two_adic_unit_criterion() {
    // for odd x and odd a: v_2(sigma_inv(x^a)) = 1 iff x ≡ a ≡ 1 (mod 4)
    for x in (-99..=99i64).step_by(2) {
        if x == -1 {
            continue;
        }
        for a in (1..=19u64).step_by(2) {
            let v = valuation(2, &sigma_inv_of_power(x, a)).unwrap();
            let expected_unit = x.rem_euclid(4) == 1 && a % 4 == 1;
            assert_eq!(v == 1, expected_unit, "x={} a={}", x, a);
            assert!(v >= 1, "odd exponent must give positive 2-adic valuation");
        }
    }
}

#[test]
fn order_divides_group_order() {
    for &q in &ODD_PRIMES {
        for x in -50..=50i64 {
            if x % q as i64 == 0 {
                continue;
            }
            let order = multiplicative_order(q, &BigInt::from(x)).unwrap();
            assert_eq!((q - 1) % order, 0, "q={} x={}", q, x);
        }
    }
}

#[test]
fn eulerian_check_accepts_descartes_and_voight() {
    for text in ["3^2 * 7^2 * 11^2 * 13^2 * 22021^1", "3^4 * 7^2 * 11^2 * 19^2 * (-127)^1"] {
        let f = parse(text).unwrap();
        assert!(spoof_core::padic::eulerian_check(&f).unwrap().is_pass(), "{}", text);
    }
}

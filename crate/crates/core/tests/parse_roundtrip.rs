//! Canonical form round-trips.

use proptest::prelude::*;
use spoof_core::factorization::parse;
use spoof_core::{Exponent, Factor, Factorization};

fn arb_factor() -> impl Strategy<Value = Factor> {
    (any::<i64>(), prop_oneof![(1u64..10_000).prop_map(Some), Just(None)]).prop_map(
        |(base, exp)| match exp {
            Some(a) => Factor::finite(base, a),
            None => Factor::infinite(base),
        },
    )
}

proptest! {
    #[test]
    fn format_then_parse_is_identity(factors in prop::collection::vec(arb_factor(), 1..8)) {
        let f = Factorization::new(factors).unwrap();
        let text = f.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &f);
        // canonicalization is idempotent and formatting is stable
        let again = Factorization::new(back.factors().to_vec()).unwrap();
        prop_assert_eq!(again.to_string(), text);
    }

    #[test]
    fn concat_is_order_insensitive(
        a in prop::collection::vec(arb_factor(), 1..5),
        b in prop::collection::vec(arb_factor(), 1..5),
    ) {
        let f = Factorization::new(a).unwrap();
        let g = Factorization::new(b).unwrap();
        prop_assert_eq!(f.concat(&g), g.concat(&f));
    }
}

#[test]
fn zero_exponents_are_rejected() {
    assert!(Factorization::new(vec![Factor::finite(3, 0)]).is_err());
    assert!(parse("3^0").is_err());
}

#[test]
fn infinite_display_forms() {
    for text in ["2^inf", "1^inf * (-3)^2", "(-9)^inf"] {
        assert_eq!(parse(text).unwrap().to_string(), text);
    }
    let f = Factorization::new(vec![Factor::infinite(1), Factor::finite(1, 3)]).unwrap();
    assert_eq!(f.to_string(), "1^3 * 1^inf");
}

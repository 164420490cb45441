//! Generators and the embedded catalog of spoof perfect factorizations.
//!
//! Two σ̃₋₁-preserving rewrites generate new spoof perfect factorizations
//! from old ones:
//!
//! * base expansion: `x^a  ->  x^{a+1} * (-(1 + x + ... + x^{a+1}))^1`,
//!   which adds one base and moves the odd exponent when a is odd;
//! * squared square: `(x^2)^2  <->  x^2 * (-x)^2`.
//!
//! The catalog embeds the known nontrivial, odd, primitive spoof perfect
//! factorizations with at most six bases (twenty-one in total: ten stored
//! directly, eleven generated at load time by repeatedly expanding the
//! factor with the odd exponent), the fifteen sporadic three-base
//! factorizations of any parity, two seven-base examples from a partial
//! search, and the 74-base block with σ̃₋₁ = 1/3 that powers the
//! arbitrarily-large-Eulerian-exponent towers.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::factorization::{
    factor_sigma_tilde, int_pow, parse, Exponent, Factor, Factorization,
};
use crate::rational::ExtRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamiliesError {
    IndexOutOfRange { index: usize, len: usize },
    InfiniteExponent,
    TrivialBase,
    /// The expanded sum `1 + x + ... + x^{a+1}` vanished (base -1 only).
    ZeroSum,
    /// Split requires a factor `y^2` with `y` a perfect square >= 4.
    NotSquaredSquare,
    /// Merge requires a partner factor `(-x)^2`.
    NoMergePartner,
    UnknownFamily(u8),
    /// A side condition of the selected family failed.
    SideCondition(String),
}

impl core::fmt::Display for FamiliesError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FamiliesError::IndexOutOfRange { index, len } => {
                write!(f, "factor index {} out of range (len {})", index, len)
            }
            FamiliesError::InfiniteExponent => f.write_str("factor has an infinite exponent"),
            FamiliesError::TrivialBase => f.write_str("factor base must not be 0 or -1"),
            FamiliesError::ZeroSum => f.write_str("expansion sum is zero"),
            FamiliesError::NotSquaredSquare => {
                f.write_str("factor is not of the form (x^2)^2 with x >= 2")
            }
            FamiliesError::NoMergePartner => f.write_str("no matching (-x)^2 partner factor"),
            FamiliesError::UnknownFamily(id) => write!(f, "unknown family id {}", id),
            FamiliesError::SideCondition(msg) => write!(f, "side condition failed: {}", msg),
        }
    }
}

/// Replaces the factor `x^a` at `index` (canonical order) by
/// `x^{a+1} * (-(1 + x + ... + x^{a+1}))^1`. σ̃₋₁ is unchanged and the base
/// count grows by one; the new base is odd exactly when `a` is odd.
pub fn expand_base(f: &Factorization, index: usize) -> Result<Factorization, FamiliesError> {
    let factor = f
        .factors()
        .get(index)
        .ok_or(FamiliesError::IndexOutOfRange { index, len: f.len() })?;
    let a = factor.exponent.finite().ok_or(FamiliesError::InfiniteExponent)?;
    if factor.base.is_zero() || factor.base == BigInt::from(-1) {
        return Err(FamiliesError::TrivialBase);
    }
    let sum = factor_sigma_tilde(&factor.base, a + 1);
    if sum.is_zero() {
        return Err(FamiliesError::ZeroSum);
    }
    let mut factors: Vec<Factor> = Vec::with_capacity(f.len() + 1);
    for (i, other) in f.factors().iter().enumerate() {
        if i != index {
            factors.push(other.clone());
        }
    }
    factors.push(Factor::finite(factor.base.clone(), a + 1));
    factors.push(Factor::finite(-sum, 1));
    Ok(Factorization::new(factors).expect("nonempty"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareRewrite {
    /// `(x^2)^2 -> x^2 * (-x)^2`
    Split,
    /// `x^2 * (-x)^2 -> (x^2)^2`
    Merge,
}

/// Applies the squared-square rewrite at `index` (canonical order). Both
/// directions preserve σ̃₋₁ (and even σ̃ and the product value):
/// `1 + x^2 + x^4 = (1 + x + x^2)(1 - x + x^2)`.
pub fn squared_square(
    f: &Factorization,
    index: usize,
    direction: SquareRewrite,
) -> Result<Factorization, FamiliesError> {
    let factor = f
        .factors()
        .get(index)
        .ok_or(FamiliesError::IndexOutOfRange { index, len: f.len() })?;
    if factor.exponent != Exponent::Finite(2) {
        return Err(match direction {
            SquareRewrite::Split => FamiliesError::NotSquaredSquare,
            SquareRewrite::Merge => FamiliesError::NoMergePartner,
        });
    }
    match direction {
        SquareRewrite::Split => {
            if !factor.base.is_positive() {
                return Err(FamiliesError::NotSquaredSquare);
            }
            let root = factor.base.sqrt();
            if &root * &root != factor.base || root < BigInt::from(2) {
                return Err(FamiliesError::NotSquaredSquare);
            }
            let mut factors: Vec<Factor> = Vec::with_capacity(f.len() + 1);
            for (i, other) in f.factors().iter().enumerate() {
                if i != index {
                    factors.push(other.clone());
                }
            }
            factors.push(Factor::finite(root.clone(), 2));
            factors.push(Factor::finite(-root, 2));
            Ok(Factorization::new(factors).expect("nonempty"))
        }
        SquareRewrite::Merge => {
            let partner_base = -&factor.base;
            let partner = f
                .factors()
                .iter()
                .enumerate()
                .find(|(i, other)| {
                    *i != index
                        && other.base == partner_base
                        && other.exponent == Exponent::Finite(2)
                })
                .map(|(i, _)| i)
                .ok_or(FamiliesError::NoMergePartner)?;
            let mut factors: Vec<Factor> = Vec::with_capacity(f.len() - 1);
            for (i, other) in f.factors().iter().enumerate() {
                if i != index && i != partner {
                    factors.push(other.clone());
                }
            }
            factors.push(Factor::finite(&factor.base * &factor.base, 2));
            Ok(Factorization::new(factors).expect("nonempty"))
        }
    }
}

/// The even spoof perfect family `2^a * (2^{a+1} - 1)^1`.
pub fn even_two_base_family(a: u64) -> Factorization {
    let mersenne = int_pow(&BigInt::from(2), a + 1) - 1;
    let f = Factorization::new(alloc::vec![
        Factor::finite(2, a),
        Factor::finite(mersenne, 1),
    ])
    .expect("nonempty");
    debug_assert!(f.is_spoof_perfect());
    f
}

/// Instantiates one of the nine three-base families. Families 1-6 take the
/// single index n >= 1; families 7-9 take a second index m >= 1 with
/// divisibility and size side conditions. Every returned factorization is
/// spoof perfect.
///
/// Family shapes (all verified exactly on construction):
/// 1. `(-2^{2n+2} + 2^{n+2} - 2)^1 * 2^n * (2^{n+1} - 1)^3`
/// 2. `(-2^{2n+2} + 2^{n+1} - 1)^1 * 2^n * (2^{n+1} - 1)^2`
/// 3. `(-2^{2n+1} - 1)^1 * (-2)^{2n} * 1^2`
/// 4. `(-2)^{2n-1} * 1^2 * (2^{2n} - 1)^1`
/// 5. `(-n-1)^1 * 1^1 * n^1`
/// 6. `3^1 * 3^n * (3^{n+1} - 1)^1`
/// 7. `2^n * (2^{n+1})^m * (2^{(n+1)(m+1)} - 1)^1`
/// 8. `(-(2^{n+1}-1)(2^{n+1}-m)/m)^1 * 2^n * (2^{n+1}-1-m)^1`
///    where `m | 2^{2n+2} - 2^{n+1}` and `m < 2^{n+1} - 2`
/// 9. `2^n * (2^{n+1}+m)^1 * ((2^{n+1}-1)(2^{n+1}+m+1)/(m+1))^1`
///    where `m | 2^{2n+2} - 2^{n+1}`, `m <= 2^{n+1} - 2`, and the division
///    is exact (not every m passing the first two conditions is admissible)
pub fn three_base_instance(
    family: u8,
    n: u64,
    m: Option<u64>,
) -> Result<Factorization, FamiliesError> {
    if n == 0 {
        return Err(FamiliesError::SideCondition("n must be >= 1".into()));
    }
    if (1..=6).contains(&family) && m.is_some() {
        return Err(FamiliesError::SideCondition(format!("family {} takes no m", family)));
    }
    let two = BigInt::from(2);
    let pow2 = |e: u64| int_pow(&two, e);
    let factors = match family {
        1 => alloc::vec![
            Factor::finite(-pow2(2 * n + 2) + pow2(n + 2) - 2, 1),
            Factor::finite(2, n),
            Factor::finite(pow2(n + 1) - 1, 3),
        ],
        2 => alloc::vec![
            Factor::finite(-pow2(2 * n + 2) + pow2(n + 1) - 1, 1),
            Factor::finite(2, n),
            Factor::finite(pow2(n + 1) - 1, 2),
        ],
        3 => alloc::vec![
            Factor::finite(-pow2(2 * n + 1) - 1, 1),
            Factor::finite(-2, 2 * n),
            Factor::finite(1, 2),
        ],
        4 => alloc::vec![
            Factor::finite(-2, 2 * n - 1),
            Factor::finite(1, 2),
            Factor::finite(pow2(2 * n) - 1, 1),
        ],
        5 => alloc::vec![
            Factor::finite(-BigInt::from(n + 1), 1),
            Factor::finite(1, 1),
            Factor::finite(BigInt::from(n), 1),
        ],
        6 => alloc::vec![
            Factor::finite(3, 1),
            Factor::finite(3, n),
            Factor::finite(int_pow(&BigInt::from(3), n + 1) - 1, 1),
        ],
        7..=9 => {
            let m = m.ok_or_else(|| {
                FamiliesError::SideCondition(format!("family {} needs the second index m", family))
            })?;
            if m == 0 {
                return Err(FamiliesError::SideCondition("m must be >= 1".into()));
            }
            match family {
                7 => {
                    let exp = (n + 1)
                        .checked_mul(m + 1)
                        .ok_or_else(|| FamiliesError::SideCondition("exponent overflow".into()))?;
                    alloc::vec![
                        Factor::finite(2, n),
                        Factor::finite(pow2(n + 1), m),
                        Factor::finite(pow2(exp) - 1, 1),
                    ]
                }
                8 => {
                    let mb = BigInt::from(m);
                    if !(&pow2(2 * n + 2) - pow2(n + 1)).is_multiple_of(&mb) {
                        return Err(FamiliesError::SideCondition(
                            "m must divide 2^{2n+2} - 2^{n+1}".into(),
                        ));
                    }
                    if mb >= pow2(n + 1) - 2 {
                        return Err(FamiliesError::SideCondition(
                            "m must be < 2^{n+1} - 2".into(),
                        ));
                    }
                    let numer: BigInt = (pow2(n + 1) - 1) * (pow2(n + 1) - &mb);
                    debug_assert!(numer.is_multiple_of(&mb));
                    alloc::vec![
                        Factor::finite(-numer / &mb, 1),
                        Factor::finite(2, n),
                        Factor::finite(pow2(n + 1) - 1 - &mb, 1),
                    ]
                }
                _ => {
                    let mb = BigInt::from(m);
                    if !(&pow2(2 * n + 2) - pow2(n + 1)).is_multiple_of(&mb) {
                        return Err(FamiliesError::SideCondition(
                            "m must divide 2^{2n+2} - 2^{n+1}".into(),
                        ));
                    }
                    if mb > pow2(n + 1) - 2 {
                        return Err(FamiliesError::SideCondition(
                            "m must be <= 2^{n+1} - 2".into(),
                        ));
                    }
                    let numer: BigInt = (pow2(n + 1) - 1) * (pow2(n + 1) + &mb + 1);
                    let denom = &mb + 1;
                    if !numer.is_multiple_of(&denom) {
                        return Err(FamiliesError::SideCondition(format!(
                            "(m+1) = {} does not divide (2^{{n+1}}-1)(2^{{n+1}}+m+1)",
                            denom
                        )));
                    }
                    alloc::vec![
                        Factor::finite(2, n),
                        Factor::finite(pow2(n + 1) + &mb, 1),
                        Factor::finite(numer / denom, 1),
                    ]
                }
            }
        }
        other => return Err(FamiliesError::UnknownFamily(other)),
    };
    let f = Factorization::new(factors).expect("nonempty");
    assert!(f.is_spoof_perfect(), "family {} (n={}, m={:?}) must be spoof perfect", family, n, m);
    Ok(f)
}

/// The 74-base factorization with σ̃₋₁ = 1/3, stored in repetition form
/// `(base, exponent, copies)` and expanded (and re-verified) on each call.
pub fn tower_block() -> Factorization {
    const PATTERN: &[(i64, u64, usize)] = &[
        (-619, 2, 4),
        (-31, 2, 7),
        (-19, 2, 2),
        (-11, 2, 6),
        (-7, 4, 14),
        (7, 2, 8),
        (11, 2, 1),
        (37, 2, 6),
        (67, 2, 5),
        (163, 2, 4),
        (191, 2, 7),
        (211, 2, 2),
        (2223, 2, 8),
    ];
    let mut factors = Vec::new();
    for &(base, exp, copies) in PATTERN {
        for _ in 0..copies {
            factors.push(Factor::finite(base, exp));
        }
    }
    let f = Factorization::new(factors).expect("nonempty");
    assert_eq!(f.len(), 74);
    assert_eq!(
        f.sigma_tilde_inv().expect("nontrivial"),
        ExtRational::ratio(1, 3),
        "tower block must have sigma_tilde_inv = 1/3"
    );
    f
}

/// Odd spoof perfect factorization with Eulerian exponent `2 * 3^j - 1`:
/// `1^{2*3^j - 1}` times j copies of the σ̃₋₁ = 1/3 block, so that
/// `σ̃₋₁ = (2 * 3^j) * (1/3)^j = 2`.
pub fn eulerian_tower(j: u32) -> Factorization {
    assert!(j >= 1);
    let pow3 = 3u64.checked_pow(j).expect("3^j fits u64");
    let exponent = 2 * pow3 - 1;
    let block = tower_block();
    let mut factors = alloc::vec![Factor::finite(1, exponent)];
    for _ in 0..j {
        factors.extend_from_slice(block.factors());
    }
    let f = Factorization::new(factors).expect("nonempty");
    debug_assert!(f.is_spoof_perfect());
    f
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Stored directly in this crate.
    Listed,
    /// Generated at load time by base expansion.
    Derived,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Listed => "listed",
            Provenance::Derived => "derived",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub label: String,
    pub provenance: Provenance,
    pub factorization: Factorization,
}

/// The ten directly stored odd primitive spoof perfect factorizations with
/// at most six bases. Entries 5 and 6 are the classical examples of
/// Descartes and Voight.
const ODD_PRIMITIVE_LISTED: [&str; 10] = [
    "1^1",
    "1^2 * (-3)^2 * (-5)^2 * 49^1",
    "1^2 * (-3)^2 * (-3)^2 * 7^2 * (-19)^1",
    "3^2 * 7^2 * 7^2 * 13^1 * (-19)^2",
    "3^2 * 7^2 * 11^2 * 13^2 * 22021^1",
    "3^4 * 7^2 * 11^2 * 19^2 * (-127)^1",
    "1^2 * (-3)^2 * (-3)^2 * 7^4 * (-17)^2 * 36413^1",
    "1^2 * (-3)^2 * (-5)^2 * 7^2 * (-7)^2 * (-2451)^1",
    "3^4 * 7^2 * 7^2 * (-19)^1 * 11^2 * (-19)^2",
    "3^4 * 7^2 * 7^2 * (-19)^2 * 25^2 * (-3751)^1",
];

/// The fifteen sporadic three-base spoof perfect factorizations (exactly one
/// of them is odd).
const THREE_BASE_SPORADIC: [&str; 15] = [
    "(-10)^1 * (-3)^3 * 1^2",
    "(-9)^1 * (-4)^1 * 1^2",
    "(-7)^1 * (-3)^2 * 1^2",
    "(-6)^1 * (-5)^1 * 1^2",
    "(-5)^1 * (-2)^1 * 1^4",
    "(-5)^1 * (-2)^3 * 1^3",
    "(-4)^1 * (-3)^1 * 1^3",
    "(-3)^1 * (-2)^1 * 1^5",
    "(-3)^1 * (-2)^2 * 1^3",
    "(-2)^1 * (-2)^1 * 1^7",
    "(-2)^2 * 1^1 * 3^1",
    "3^1 * 4^1 * 5^1",
    "3^1 * 4^2 * 7^1",
    "3^3 * 4^2 * 35^1",
    "3^3 * 5^1 * 8^1",
];

/// Two seven-base odd primitive spoof perfect factorizations. The seven-base
/// search they come from was not exhaustive, so this pair is not claimed to
/// be complete.
const SEVEN_BASE: [&str; 2] = [
    "1^2 * (-3)^2 * (-3)^2 * 7^2 * (-19)^2 * (-43)^1 * 49^2",
    "1^2 * (-5)^2 * (-5)^2 * (-9)^2 * 7^2 * (-9)^2 * (-101251)^1",
];

const TOWER_BLOCK_LABEL: &str = "eulerian-tower-block";

fn odd_exponent_index(f: &Factorization) -> usize {
    let odd: Vec<usize> = f
        .factors()
        .iter()
        .enumerate()
        .filter(|(_, factor)| matches!(factor.exponent.finite(), Some(a) if a % 2 == 1))
        .map(|(i, _)| i)
        .collect();
    assert_eq!(odd.len(), 1, "odd spoof perfect factorizations have a unique odd exponent");
    odd[0]
}

/// Builds the embedded catalog, verifying every entry: σ̃₋₁ = 2 for all
/// entries except the tower block, which is checked against 1/3. The eleven
/// derived odd-primitive entries are generated by repeatedly expanding the
/// factor with the odd exponent while the base count stays at most six.
pub fn catalog(filter: Option<&str>) -> Vec<CatalogEntry> {
    let mut entries = Vec::new();
    for (i, text) in ODD_PRIMITIVE_LISTED.iter().enumerate() {
        let name = match i {
            4 => "odd-primitive/listed-5/Descartes".into(),
            5 => "odd-primitive/listed-6/Voight".into(),
            _ => format!("odd-primitive/listed-{}", i + 1),
        };
        let f = parse(text).expect("embedded catalog text");
        entries.push(CatalogEntry {
            label: name,
            provenance: Provenance::Listed,
            factorization: f.clone(),
        });
        let mut current = f;
        let mut step = 1;
        loop {
            if current.len() >= 6 {
                break;
            }
            current = expand_base(&current, odd_exponent_index(&current))
                .expect("expansion of a catalog entry");
            entries.push(CatalogEntry {
                label: format!("odd-primitive/expansion-{}-{}", i + 1, step),
                provenance: Provenance::Derived,
                factorization: current.clone(),
            });
            step += 1;
        }
    }
    for (i, text) in THREE_BASE_SPORADIC.iter().enumerate() {
        entries.push(CatalogEntry {
            label: format!("three-base-sporadic-{}", i + 1),
            provenance: Provenance::Listed,
            factorization: parse(text).expect("embedded catalog text"),
        });
    }
    for (i, text) in SEVEN_BASE.iter().enumerate() {
        entries.push(CatalogEntry {
            label: format!("seven-base-{}", i + 1),
            provenance: Provenance::Listed,
            factorization: parse(text).expect("embedded catalog text"),
        });
    }
    entries.push(CatalogEntry {
        label: TOWER_BLOCK_LABEL.into(),
        provenance: Provenance::Listed,
        factorization: tower_block(),
    });
    for entry in &entries {
        if entry.label == TOWER_BLOCK_LABEL {
            continue;
        }
        assert!(
            entry.factorization.is_spoof_perfect(),
            "catalog entry {} must be spoof perfect",
            entry.label
        );
    }
    match filter {
        Some(pattern) => entries.retain(|e| e.label.contains(pattern)),
        None => {}
    }
    entries
}

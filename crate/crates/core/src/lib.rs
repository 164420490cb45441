//! Exact arithmetic and exhaustive search for spoof perfect factorizations.
//!
//! A *factorization* is a formal product `x_1^{a_1} * ... * x_k^{a_k}` of
//! integer bases with positive integer exponents; it is not required to be a
//! prime factorization, and bases may be negative, composite, or repeated.
//! Pretending the bases are distinct primes, the sum-of-divisors function
//! extends to `σ̃ = ∏ (1 + x_i + ... + x_i^{a_i})`, and a factorization is
//! *spoof perfect* when `σ̃ = 2n`, equivalently when the normalized value
//! `σ̃₋₁ = σ̃ / n` equals 2 exactly.
//!
//! Everything in this crate works over arbitrary-precision integers and
//! reduced rationals; there is no floating point anywhere. The crate is
//! `no_std` (with `alloc`); IO, file formats, and the CLI live in the
//! companion `spoofsearch` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod factorization;
pub mod families;
pub mod padic;
pub mod rational;
pub mod search;

pub use factorization::{Exponent, Factor, Factorization, FactorizationError, ParseError};
pub use rational::ExtRational;

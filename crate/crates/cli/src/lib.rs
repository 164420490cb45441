//! IO companion for the spoof perfect factorization library: JSON forms,
//! checkpoint files, and the multi-worker search runner. The binary target
//! `spoofsearch` is the command-line surface.

pub mod checkpoint;
pub mod json;
pub mod runner;

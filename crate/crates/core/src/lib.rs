//! Numerical laboratory for the pair correlation of Riemann zeta zeros.
//!
//! The crate evaluates the zeta function and Hardy's Z on and near the
//! critical line, finds and stores zero ordinates, and measures the counting
//! and correlation statistics built from them: the Riemann-von Mangoldt
//! counting identity, multiplicity-weighted censuses, pair-correlation
//! histograms against the GUE prediction, and the second-moment identities
//! that relate `(N(t+U) - N(t))^2` integrals to triangle-weighted pair sums.
//!
//! All arithmetic is plain `f64`; every routine is deterministic, and the
//! randomized constructions (synthetic zero sets, control processes) are
//! reproducible from an explicit seed.

pub mod counting;
pub mod eval;
pub mod gue;
pub mod moments;
pub mod zeros;

mod error;
mod quad;
mod rs_tables;

pub use error::{Error, Result};

/// Complex values handed across the public API.
pub type ComplexValue = num_complex::Complex64;

use thiserror::Error;

/// Everything the library can refuse to do, in one place.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {what} = {value} outside the supported range")]
    Domain { what: &'static str, value: f64 },

    #[error("zeta has a pole at s = 1")]
    Pole,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("argument tracking failed near sigma = {sigma}, t = {t}: step fell below {min_step}")]
    UnwrapFailure { sigma: f64, t: f64, min_step: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("refinement did not converge after {iterations} iterations")]
    NonConvergence { iterations: u32 },

    #[error("zero count mismatch on ({lo}, {hi}]: found {found}, counting function gives {expected}")]
    CountMismatch {
        lo: f64,
        hi: f64,
        found: i64,
        expected: i64,
    },

    #[error("zero set is incomplete over the requested range ({lo}, {hi}]")]
    IncompleteSet { lo: f64, hi: f64 },

    #[error("zero set is not sorted by (gamma, beta) or violates its range")]
    InvalidSet(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("network error after {retries} attempts: {msg}")]
    Network { retries: u32, msg: String },

    #[error("unrecognized cache header: {0}")]
    VersionMismatch(String),

    #[error("cache body does not match its checksum")]
    ChecksumMismatch,

    #[error("cache is locked by another writer: {0}")]
    CacheLocked(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by the permutation, representation and pipeline layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("lehmer digit {digit} at position {position} exceeds bound {max}")]
    LehmerDigitOutOfRange {
        position: usize,
        digit: usize,
        max: usize,
    },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid observation field `{field}`: {reason}")]
    InvalidObservation { field: &'static str, reason: String },

    #[error("likelihood trust s = {0} outside (0.5, 1]")]
    LikelihoodDomain(f64),

    #[error("probability {value} outside {domain}")]
    ProbabilityDomain { value: f64, domain: &'static str },

    #[error("state annihilated during {stage}: no probability mass left")]
    Annihilated { stage: &'static str },

    #[error("degree {n} exceeds size guard {max}")]
    SizeGuard { n: usize, max: usize },

    #[error("malformed spectrum: {0}")]
    MalformedSpectrum(String),

    #[error("length {0} is not a factorial")]
    NotFactorial(usize),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

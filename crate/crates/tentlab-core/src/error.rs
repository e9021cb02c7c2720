use thiserror::Error;

/// Failure kinds shared by every module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision exhausted at {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("branch word not realizable at level {level}")]
    NotRealizable { level: usize },
    #[error("interval meets post-critical point c_{index} (cap {cap})")]
    NotInY { index: usize, cap: usize },
    #[error("critical orbit is not finite; no Markov partition")]
    NotMarkov,
    #[error("no convergence after {0} iterations")]
    NotConverged(usize),
    #[error("point lies in the grand orbit of c (index {0})")]
    InGrandOrbit(usize),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("orbit entered the plateau interior at step {0}")]
    EnteredGamma(usize),
    #[error("depth exhausted: {0}")]
    DepthExhausted(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("inconsistent detectors: {0}")]
    Inconsistent(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("division by zero")]
    DivisionByZero,
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("empty set not allowed: {0}")]
    EmptySet(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("sets overlap: {0}")]
    Overlap(String),
    #[error("separation failed at level {level}: best achieved {best}")]
    SeparationFailed { level: u32, best: String },
    #[error("interval containment failure at {stage}: {detail}")]
    ContainmentFailure { stage: String, detail: String },
    #[error("guard digits exhausted (n = {0})")]
    GuardExhausted(u32),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

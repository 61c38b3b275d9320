use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("superoperator too large for dense matrix form: dimension {dim} exceeds limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("source model `{model}` does not support {operation}")]
    UnsupportedVariant { model: &'static str, operation: &'static str },

    #[error("invariant violated at t = {time}: {detail}")]
    InvariantViolation { time: f64, detail: String },

    #[error("per-step jump probability {probability:.4} exceeds {limit} (dominant channel `{channel}` at {channel_probability:.4}, t = {time})")]
    StepProbability {
        probability: f64,
        limit: f64,
        channel: String,
        channel_probability: f64,
        time: f64,
    },

    #[error("time grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

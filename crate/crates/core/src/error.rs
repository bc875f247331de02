use thiserror::Error;

/// Errors raised by the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("trajectory length {got} does not match grid with {expected} samples")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at t = {time}: {what}")]
    NonFiniteAtTime { time: f64, what: String },

    #[error("integration produced a non-finite state at step {step}")]
    NonFiniteStep { step: usize },

    #[error("non-finite noise accumulation at frequency node {index} (omega = {omega})")]
    NonFiniteNode { index: usize, omega: f64 },

    #[error("singular covariance sum (det = {det:e})")]
    SingularCovariance { det: f64 },

    #[error("unknown order model `{name}` (available: {available})")]
    UnknownModel { name: String, available: String },

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("curve is not short: speed {speed} at segment {segment} exceeds 1")]
    NotShort { segment: usize, speed: f64 },

    #[error("height {height} exceeds the critical height {y_star}")]
    AboveCriticalHeight { height: f64, y_star: f64 },

    #[error("negative height {0}")]
    NegativeHeight(f64),

    #[error("configuration violates a junction condition: {0}")]
    Junction(String),

    #[error("anchor unreachable: {0}")]
    Unreachable(String),

    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("scaling regime: {0}")]
    Regime(String),

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

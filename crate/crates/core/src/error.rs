use thiserror::Error;

/// Errors produced anywhere in the simulator, optimizer or run tooling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Fock dimension {0}: need at least {1}")]
    InvalidDimension(usize, usize),

    #[error("shape mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    Shape {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("Fock index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("numerical error: {0}")]
    Numeric(String),

    #[error("Fourier series is not real: imaginary residual {0:e} at t = {1}")]
    SymmetryViolation(f64, f64),

    #[error("density-matrix invariant violated at t = {t}: {what}")]
    Invariant { t: f64, what: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown parameter `{name}`; valid names: {valid}")]
    UnknownParameter { name: String, valid: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

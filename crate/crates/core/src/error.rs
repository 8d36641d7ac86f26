use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("SCF did not converge after {iterations} iterations (energy change {energy_change:.3e}, density change {density_change:.3e})")]
    ScfNotConverged {
        iterations: usize,
        energy_change: f64,
        density_change: f64,
    },

    #[error("eigensolver did not converge after {iterations} iterations (max residual {residual:.3e})")]
    EigenNotConverged { iterations: usize, residual: f64 },

    #[error("determinant space of {size} exceeds the budget of {budget}")]
    DeterminantBudget { size: usize, budget: usize },

    #[error("FCIDUMP line {line}: {message}")]
    Fcidump { line: usize, message: String },

    #[error("only {available} singlet states available, {requested} requested")]
    NotEnoughSinglets { available: usize, requested: usize },

    #[error("checksum mismatch: expected {expected}, found {found}")]
    Checksum { expected: String, found: String },

    #[error("malformed container: {0}")]
    Container(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched grids, malformed data, NaN or negative values.
    #[error("structural error: {0}")]
    Structural(String),
    /// A numeric parameter outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A mathematical precondition of the requested estimate fails.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An iterative solver stopped before reaching its tolerance.
    #[error("solver failure: {message} (residual {residual:e} after {iterations} iterations)")]
    Solver {
        message: String,
        residual: f64,
        iterations: usize,
    },
    /// A hypothesis required by a check does not hold on the supplied data.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

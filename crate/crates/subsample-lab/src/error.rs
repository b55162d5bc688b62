use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("matrix is singular or not positive definite: smallest eigenvalue {min_eig:e} below floor {floor:e}")]
    SingularMatrix { min_eig: f64, floor: f64 },

    #[error("root bracketing failed for {context}: no sign change after {expansions} expansions")]
    BracketFailure { context: String, expansions: usize },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error("data error at row {row}, column {column}: {message}")]
    Data {
        row: usize,
        column: String,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the solver library.
#[derive(Debug, Error)]
pub enum GfbpError {
    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    Shape {
        context: String,
        expected: String,
        got: String,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("divergence at iteration {iteration}: block `{block}` produced a non-finite value")]
    Divergence { iteration: u64, block: String },

    #[error("estimate did not converge within {iters} iterations (best value {best:e})")]
    Estimation { best: f64, iters: usize },

    #[error("{path}: {msg} (row {row}, column {col})")]
    Format {
        path: PathBuf,
        row: usize,
        col: usize,
        msg: String,
    },

    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GfbpError>;

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a geometric map (typically `r <= 2M`).
    #[error("{what} outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("root finding for {what} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// A constructor or operation precondition was violated.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("data support: {0}")]
    Support(String),

    /// The marcher produced a non-finite value.
    #[error("evolution failure: non-finite value at node (i={i}, j={j})")]
    Evolution { i: usize, j: usize },

    #[error("field not computed where required: {0}")]
    MaskIncomplete(String),

    #[error("corner incompatibility: horizon edge {horizon} vs infinity edge {infinity}")]
    CornerMismatch { horizon: f64, infinity: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("malformed table {path}: {reason}")]
    Table { path: PathBuf, reason: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

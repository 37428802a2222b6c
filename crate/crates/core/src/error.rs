// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(
        "union graph is disconnected ({components} weakly connected components); \
         run the analysis per component"
    )]
    Disconnected { components: usize },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("stream monotonicity violated: time {got} precedes current time {now}")]
    Monotonicity { now: u64, got: u64 },

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
}

impl Error {
    /// Stable machine-readable tag, used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Disconnected { .. } => "disconnected",
            Error::NotConverged { .. } => "not_converged",
            Error::Monotonicity { .. } => "monotonicity",
            Error::TooLarge(_) => "too_large",
        }
    }
}

use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{name} = {value} is outside the valid domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("peer index {index} out of range for {n} peers")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A fixed-point search ran out of iterations.
    #[error("no convergence after {iterations} iterations (last iterate {last:?}, residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    /// A non-finite value appeared in the contribution profile.
    #[error("non-finite contribution for peer {peer} at iteration {iteration}")]
    NumericalFailure { iteration: usize, peer: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("instance file line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_nonnegative(name: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::Domain {
            name,
            value,
            reason: "must be finite",
        });
    }
    if value < 0.0 {
        return Err(Error::Domain {
            name,
            value,
            reason: "must be nonnegative",
        });
    }
    Ok(value)
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Domain {
            name,
            value,
            reason: "must be positive and finite",
        });
    }
    Ok(value)
}

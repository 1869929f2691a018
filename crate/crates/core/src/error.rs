use thiserror::Error;

use crate::funcspec::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Gamma evaluated at (or within 1e-12 of) a non-positive integer.
    #[error("gamma pole at x = {0}")]
    Pole(f64),

    #[error("series did not converge: {what} after {terms} terms (last term {last_term:e})")]
    NonConvergence {
        what: &'static str,
        terms: usize,
        last_term: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Richardson differences already below the noise floor.
    #[error("degenerate convergence data: successive differences below {0:e}")]
    Degenerate(f64),

    #[error("matrix is numerically singular (condition estimate {0:e})")]
    Singular(f64),

    #[error(
        "fixed-point iteration failed at step {step} after {iterations} iterations \
         (residual {residual:e}); reduce the step h = L/N"
    )]
    SolverNonConvergence {
        step: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("period {period} is not an integer multiple of the step {h}")]
    GridMisaligned { period: f64, h: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

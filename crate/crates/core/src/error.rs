use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{func}: argument {value} outside domain ({expected})")]
    Domain {
        func: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("window [{lo}, {hi}] captures mass {captured}, below 1 - {tol}")]
    Truncation {
        lo: f64,
        hi: f64,
        captured: f64,
        tol: f64,
    },

    #[error("grid spacings differ: {0} vs {1}")]
    SpacingMismatch(f64, f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{0} has no classical derivative")]
    NotDifferentiable(String),

    #[error("inadmissible Young exponents: {0}")]
    Inadmissible(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(func: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        func,
        value,
        expected,
    }
}

//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// Cholesky factorization met a non-positive pivot.
    #[error("matrix is not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    /// An iterative method failed or a result left its admissible range.
    #[error("{0}")]
    Numerical(String),

    /// The Painleve II integration diverged or left the Hastings-McLeod branch.
    #[error("{0}")]
    Integration(String),

    /// A distribution table could not be validated against its oracle.
    #[error("{0}")]
    Build(String),
}

impl Error {
    /// Short stable identifier, used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::NotPositiveDefinite { .. } => "not-positive-definite",
            Error::Numerical(_) => "numerical",
            Error::Integration(_) => "integration",
            Error::Build(_) => "build",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

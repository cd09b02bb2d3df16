use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument or parameter lies outside the domain of the operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The affine operator needs the function at an argument beyond its declared domain.
    #[error(
        "function undefined at argument {argument} required by term k={k} (declared domain ends at {upper})"
    )]
    Domain { k: usize, argument: f64, upper: f64 },

    #[error("function evaluated to a non-finite value at {point}")]
    NonFinite { point: String },

    #[error("tridiagonal eigenvalue iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn non_finite_1d(x: f64) -> Self {
        Error::NonFinite {
            point: format!("x = {x}"),
        }
    }

    pub(crate) fn non_finite_2d(x: f64, y: f64) -> Self {
        Error::NonFinite {
            point: format!("(x, y) = ({x}, {y})"),
        }
    }
}

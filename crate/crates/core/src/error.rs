use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented precondition (integrability, exponent range, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty grid")]
    EmptyGrid,

    /// A function returned a non-finite value at a quadrature node.
    #[error("non-finite evaluation at t = {at}: {what}")]
    Evaluation { at: f64, what: String },

    /// An improper integral that was required to be finite diverged.
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// The truncated tail of an infinite-support integral exceeded the error budget.
    #[error("truncation tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    Truncation { bound: f64, tolerance: f64 },

    #[error("quadrature did not converge: {0}")]
    NoConvergence(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

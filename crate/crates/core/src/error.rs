use thiserror::Error;

/// Errors raised by the evaluators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The arguments are valid but outside the regime where the method is justified.
    #[error("regime error: {0}")]
    Regime(String),

    /// An iterative procedure did not reach its tolerance. For quadrature the
    /// best estimate and its error bound are carried along.
    #[error("convergence error: {message}")]
    Convergence {
        message: String,
        best_ln: Option<f64>,
        error_ln: Option<f64>,
    },

    /// Malformed tabulated input.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

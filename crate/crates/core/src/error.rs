use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A dense decomposition did not converge. Carries the diagnostics of the
    /// offending matrix.
    #[error(
        "numeric failure in {routine}: n={dim}, frobenius={frobenius:e}, max_abs={max_abs:e}, finite={finite}"
    )]
    NumericFailure {
        routine: &'static str,
        dim: usize,
        frobenius: f64,
        max_abs: f64,
        finite: bool,
    },

    #[error("map is not linear: superposition residual {residual:e} exceeds {tolerance:e}")]
    NotLinear { residual: f64, tolerance: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

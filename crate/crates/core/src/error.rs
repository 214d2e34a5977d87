use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A constrained component has zero mass, so its multiplier is undefined.
    #[error("degenerate constraint: {0}")]
    DegenerateConstraint(String),

    #[error("invalid solution family: {0}")]
    InvalidFamily(String),

    #[error("supports overlap on {overlap} grid samples")]
    SupportOverlap { overlap: usize },

    #[error("minimizer did not converge after {iterations} iterations (last residual {residual:e})")]
    Diverged { iterations: usize, residual: f64 },

    #[error("numerical blowup at {at}: {reason}")]
    NumericalBlowup { at: f64, reason: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the CLI: 3 for numerical failures, 2 for
    /// everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Diverged { .. } | Error::NumericalBlowup { .. } | Error::Internal(_) => 3,
            _ => 2,
        }
    }
}

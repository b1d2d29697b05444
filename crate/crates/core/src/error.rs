use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller violated an operation precondition (shape, range, symmetry).
    #[error("usage error: {0}")]
    Usage(String),

    /// A parameter value is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested combination of options is not implemented.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// A non-finite entry appeared in the integrated state.
    #[error("integration diverged at t = {t}: non-finite entry in {component}")]
    Diverged { t: f64, component: String },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

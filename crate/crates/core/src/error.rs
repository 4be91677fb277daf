use thiserror::Error;

/// Failures raised by the numerical kernel.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("inversion failed: {message} (best residual {residual:e})")]
    Inversion { message: String, residual: f64 },
    #[error("composition error: {0}")]
    Composition(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("time {t} is beyond the backward horizon {horizon}")]
    Horizon { t: f64, horizon: f64 },
    #[error("pullback and ODE orbits disagree: sup deviation {deviation:e} at t = {t}")]
    CrossValidation { deviation: f64, t: f64 },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

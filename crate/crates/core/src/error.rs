use thiserror::Error;

/// Errors raised by the design, planning and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("invalid waypoints: {0}")]
    InvalidWaypoints(String),

    #[error("trajectory planning failed: {0}")]
    Planning(String),

    #[error("invalid eigenvalue {0}: must be strictly negative")]
    InvalidEigenvalue(f64),

    #[error("controller/estimator design failed: {0}")]
    Design(String),

    #[error("simulation failed at t = {t} s: {reason}")]
    Simulation { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn invalid_arg(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}

//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by qslkit operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Operands have incompatible dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix that must represent a quantum state fails the state
    /// invariants (trace, Hermiticity, positivity).
    #[error("not a state: {0}")]
    NotAState(String),

    /// A time argument fell outside the schedule window.
    #[error("time {t} out of range [0, {tau}]")]
    TimeOutOfRange { t: f64, tau: f64 },

    /// The instantaneous spectrum is degenerate, so eigenstate-based
    /// quantities are undefined.
    #[error("degenerate spectrum: delta = {delta}, g = {g}")]
    DegenerateSpectrum { delta: f64, g: f64 },

    /// Numerical integration failed; the diagnostic carries the time at
    /// which the problem was detected.
    #[error("integration failed at t = {t_us} us: {reason}")]
    Integration { t_us: f64, reason: String },

    /// Scenario configuration could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    /// File I/O while reading configs or writing results.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

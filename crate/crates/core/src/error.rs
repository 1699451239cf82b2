use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {reason}")]
    Domain { func: &'static str, reason: String },

    #[error("{func} did not converge (best estimate {best}, error estimate {error_estimate:e})")]
    NonConvergence {
        func: &'static str,
        best: f64,
        error_estimate: f64,
    },

    #[error("integrand returned a non-finite value ({value}) at {at}")]
    Evaluation { at: f64, value: f64 },

    #[error("overflow in {func}")]
    Overflow { func: &'static str },

    #[error("spectral parameter {lambda} is within {guard:e} of eigenvalue {eigenvalue}")]
    Pole {
        lambda: f64,
        eigenvalue: f64,
        guard: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        func,
        reason: reason.into(),
    }
}

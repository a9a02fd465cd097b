use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A quantity left its physical domain, e.g. a continued permittivity
    /// that is not strictly positive.
    #[error("domain error in {module}: {message}")]
    Domain {
        module: &'static str,
        message: String,
    },

    #[error("invalid input to {module}: {message}")]
    InvalidInput {
        module: &'static str,
        message: String,
    },

    #[error("grid too small: need at least {required} nodes, got {actual}")]
    GridTooSmall { required: usize, actual: usize },

    #[error("unstable time step: Courant number {courant} exceeds {limit}")]
    Unstable { courant: f64, limit: f64 },

    #[error("non-finite field value at step {step}, node {node}")]
    NonFinite { step: usize, node: usize },

    #[error("no pulse at probe: recorded energy {energy:e} below threshold {threshold:e}")]
    NoPulse { energy: f64, threshold: f64 },

    #[error("{method} did not converge: {message}")]
    NoConvergence {
        method: &'static str,
        message: String,
    },
}

impl Error {
    pub(crate) fn domain(module: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(module: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            module,
            message: message.into(),
        }
    }

    /// Name of the module that produced the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Domain { module, .. } | Error::InvalidInput { module, .. } => module,
            Error::GridTooSmall { .. } => "kemmer",
            Error::Unstable { .. } | Error::NonFinite { .. } | Error::NoPulse { .. } => "fdtd",
            Error::NoConvergence { .. } => "numerics",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

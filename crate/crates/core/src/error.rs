use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied argument or configuration value is out of range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A state produced internally violates the uncertainty relation or some
    /// other physical invariant. Indicates a construction bug, not bad input.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The Fock oracle's photon-number cutoff is too small for the state.
    #[error("truncation error: tail mass {tail_mass:.3e} exceeds threshold {threshold:.3e}")]
    Truncation { tail_mass: f64, threshold: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

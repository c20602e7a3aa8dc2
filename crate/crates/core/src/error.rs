use thiserror::Error;

/// Errors raised by the oscillator, dilation and Fock-space routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator is not a contraction (largest singular value {sigma_max})")]
    NotAContraction { sigma_max: f64 },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("degenerate Bogoliubov transformation (smallest singular value {smallest_singular_value:e})")]
    DegenerateTransformation { smallest_singular_value: f64 },

    #[error("grid window too small: {lost_mass:e} of squared norm shifted out of the window")]
    WindowTooSmall { lost_mass: f64 },

    #[error("inconsistent generator: {0}")]
    InconsistentGenerator(String),

    #[error("truncated subspace cannot represent the requested vectors (residual {residual:e})")]
    TruncationInsufficient { residual: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

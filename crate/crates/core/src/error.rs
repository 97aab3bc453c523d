use thiserror::Error;

/// Errors produced by the hashing, geometry and experiment routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mixed point models in one dataset")]
    MixedModels,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("insufficient pairs: {near} near, {far} far")]
    InsufficientPairs { near: usize, far: usize },

    #[error("quadrature did not converge (estimate {estimate}, error {error_estimate})")]
    QuadratureNonConvergence { estimate: f64, error_estimate: f64 },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

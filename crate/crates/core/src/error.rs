use thiserror::Error;

/// Errors raised by the geometry, kernel, objective and training routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("point is off the hyperboloid (residual {residual:e})")]
    OffManifold { residual: f64 },

    #[error("vector is not tangent to its base point (<base, v> = {inner:e})")]
    NotTangent { inner: f64 },

    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{matrix} is not positive definite even with jitter {jitter:e}")]
    Conditioning { matrix: &'static str, jitter: f64 },

    #[error("correlation undefined: {0} has zero variance")]
    UndefinedCorrelation(&'static str),

    #[error("training aborted at epoch {epoch}: {reason}")]
    TrainingAborted { epoch: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

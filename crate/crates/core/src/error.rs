use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("endpoint mismatch: {0}")]
    Endpoint(String),
    #[error("arrows or objects belong to different categories")]
    BackendMismatch,
    #[error("matrix is not positive definite (smallest eigenvalue {min_eig:e})")]
    NotPositive { min_eig: f64 },
    #[error("matrix is singular (smallest singular value {sigma_min:e})")]
    Singular { sigma_min: f64 },
    #[error("no convergence after {iterations} iterations (last change {change:e})")]
    NoConvergence { iterations: usize, change: f64 },
    #[error("no hom data for ({src}, {dst})")]
    MissingHom { src: String, dst: String },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension cap exceeded: need {required}, cap {cap}")]
    CapExceeded { required: usize, cap: usize },
    #[error("ring is not connected from the unit; unreachable labels: {0:?}")]
    Disconnected(Vec<String>),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

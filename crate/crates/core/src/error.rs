use thiserror::Error;

/// Errors produced by the geometric and statistical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("zonotope is flat: generators do not span the plane")]
    FlatZonotope,

    #[error("polygon is degenerate (zero area or fewer than three vertices)")]
    DegeneratePolygon,

    #[error("point cloud is degenerate: affine dimension {affine_dim} < {required}")]
    DegenerateCloud { affine_dim: usize, required: usize },

    #[error("polar integral diverges: generators of Z(x) do not span R^{dim}")]
    DivergentPolar { dim: usize },

    #[error("covariance is singular or not positive definite")]
    SingularCovariance,

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("expected a positive value, got {0}")]
    NonPositive(f64),

    #[error("k = {k} exceeds sample size {n}")]
    KTooLarge { k: usize, n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

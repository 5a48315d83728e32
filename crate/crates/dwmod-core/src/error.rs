//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension {dim} exceeds the supported cap {max}")]
    TooLarge { dim: usize, max: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("algebra element is not a scalar multiple of a coisometry")]
    NotCoisometryMultiple,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("scalar coefficient {index} is zero")]
    ZeroScalar { index: usize },

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("bound violated: lower {lower:.17e} <= lhs {lhs:.17e} <= upper {upper:.17e} fails")]
    BoundViolation { lhs: f64, upper: f64, lower: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("constraint set has dimension {got}, expected {expected}")]
    WrongDimension { expected: usize, got: usize },

    #[error("invalid forge spec: {0}")]
    InvalidSpec(String),
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular tridiagonal system (pivot {pivot:e} at row {row})")]
    SingularMatrix { row: usize, pivot: f64 },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("point {0} lies outside [0, 1]")]
    OutOfDomain(f64),

    #[error("the zero equilibrium vanishes on the whole interval")]
    EverywhereZero,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no sign change in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("lambda = {lambda} is not an eigenvalue (|D| = {residual:e})")]
    NotAnEigenvalue { lambda: f64, residual: f64 },

    #[error("pivot breakdown at row {row} during elimination")]
    PivotBreakdown { row: usize },

    #[error("requested {requested} eigenpairs but only {available} exist")]
    TooManyEigenpairs { requested: usize, available: usize },

    #[error("Gram matrix is ill-conditioned (condition number {0:e})")]
    IllConditionedGram(f64),

    #[error("perturbed profile has {found} interior sign changes, expected {expected}")]
    ZeroCountMismatch { expected: usize, found: usize },

    #[error("fit window is empty: {0}")]
    EmptyWindow(String),

    #[error("perturbed profile lost positivity at t = {0}")]
    PositivityLost(f64),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("malformed data file: {0}")]
    Parse(String),
}

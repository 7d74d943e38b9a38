use thiserror::Error;

/// Failure modes of the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square with positive dimension (got {rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("singular matrix: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("non-finite entry produced by {0}")]
    NonFinite(&'static str),

    #[error("matrix norm {norm:e} exceeds the exponential limit {limit:e}")]
    Overflow { norm: f64, limit: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("spectrum may touch the branch cut (-inf, 0]: {0}")]
    BranchCutViolation(String),

    #[error("invalid contour: {0}")]
    ContourInvalid(String),

    #[error("curve evaluation failed at t = {t}: {reason}")]
    EvaluationFailure { t: f64, reason: String },

    #[error("time stepping failed at step {step} (t = {t})")]
    StepFailure { step: usize, t: f64 },

    #[error("series argument norm {norm:e} is outside the unit convergence radius")]
    ConvergenceViolation { norm: f64 },

    #[error("invalid size {0}: grid families need n >= 4")]
    InvalidSize(usize),

    #[error("work estimate {estimate:e} exceeds budget {budget:e}")]
    BudgetExceeded { estimate: f64, budget: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

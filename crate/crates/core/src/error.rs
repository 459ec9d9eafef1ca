use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("angle out of range: {name} = {value}")]
    AngleOutOfRange { name: &'static str, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("singular pivot at index {index} (|pivot| = {magnitude:e})")]
    SingularPivot { index: usize, magnitude: f64 },

    #[error("inverse iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("mass entry {index} is not strictly positive ({value})")]
    NonPositiveMass { index: usize, value: f64 },

    #[error("dense oracle limited to dimension {max}, got {dim}")]
    DimensionGuard { dim: usize, max: usize },

    #[error("mode n = {n} is below the positivity threshold N = {nmin}")]
    BelowThreshold { n: u32, nmin: u32 },

    #[error("boundary-value residual {residual:e} exceeds {bound:e}")]
    ResidualExceeded { residual: f64, bound: f64 },

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    /// True for failures that indicate a contradiction with the expected
    /// qualitative behaviour rather than a numerical breakdown.
    pub fn is_theorem_violation(&self) -> bool {
        matches!(self, Error::TheoremViolation(_))
    }
}

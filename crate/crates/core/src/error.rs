use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain where the object is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Gauss-Jacobi node refinement did not converge (degree {degree}, residual {residual:e})")]
    Convergence { degree: usize, residual: f64 },

    #[error("grid resolution unattainable: {0}")]
    GridResolution(String),

    #[error("cutoff type mismatch: {0}")]
    TypeMismatch(String),

    #[error("dyadic covering fails: denominator {value:e} at {location:?}")]
    CoveringFailure { value: f64, location: Vec<f64> },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("spectrum not covered by levels 0..={j_max}: mode {mode:?} is still active at level {level}")]
    SpectrumNotCovered {
        j_max: u32,
        level: u32,
        mode: Vec<usize>,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

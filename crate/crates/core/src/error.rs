use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported quadrature order {0} (expected 2..=256)")]
    UnsupportedOrder(usize),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    Singular { pivot: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("{what} did not converge (best value {best_value:e})")]
    Convergence {
        what: String,
        best_point: Vec<f64>,
        best_value: f64,
    },

    #[error("non-finite evaluation: {0}")]
    Evaluation(String),

    #[error("degenerate distortion: output power is zero")]
    DegenerateDistortion,

    #[error("degenerate quantizer cell {0}: zero width in the t-domain")]
    DegenerateCell(usize),

    #[error("invalid quantizer: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numeric consistency: {0}")]
    NumericConsistency(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
}

pub type Result<T> = std::result::Result<T, Error>;

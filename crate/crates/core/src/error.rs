use thiserror::Error;

/// Errors produced by copula construction, evaluation, and estimation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CopulaError {
    #[error("{family}: parameter out of range ({constraint})")]
    ParameterOutOfRange {
        family: &'static str,
        constraint: String,
    },

    #[error("evaluation at the boundary of the unit cube: {0}")]
    EvaluationAtBoundary(String),

    #[error("root not bracketed on [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },

    #[error("unsupported family for this operation: {0}")]
    UnsupportedFamily(String),

    #[error("density unavailable for {0}")]
    DensityUnavailable(String),

    #[error("non-positive candidate density {value:e} at ({u1}, {u2})")]
    NonpositiveDensity { u1: f64, u2: f64, value: f64 },

    #[error("tail extrapolation did not converge (last extrapolants {0:?})")]
    NonConvergent(Vec<f64>),

    #[error("singular design matrix")]
    SingularDesign,

    #[error("residual vector has zero variance")]
    DegenerateResiduals,

    #[error("optimizer diverged: {0}")]
    OptimizerDiverged(String),

    #[error("estimate {name} = {value} sits on the parameter bound")]
    ParameterAtBound { name: &'static str, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = CopulaError> = std::result::Result<T, E>;

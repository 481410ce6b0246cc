use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("graph generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },
    #[error("operation requires a torus graph")]
    NotATorus,
    #[error("operation requires a regular graph, got {0}")]
    NotRegular(String),
    #[error("graph has {vertices} vertices, above the dense cap of {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("singular first-step system (graph disconnected?)")]
    SingularSystem,
    #[error("iteration did not converge after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },
    #[error("box partition does not match the visit set ({0})")]
    PartitionMismatch(String),
    #[error("simulation budget of {budget} particle-steps exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("no threshold crossing within s <= {cap}")]
    NoCrossingWithinCap { cap: u64 },
    #[error("parameter outside the inequality's domain: {0}")]
    DomainError(String),
    #[error("estimator budget too small: {0}")]
    BudgetTooSmall(String),
    #[error("hitting-probability regime unspecified or invalid: {0}")]
    RegimeUnspecified(String),
    #[error("result shapes do not match: {0}")]
    ShapeMismatch(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake-case identifier of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::GenerationFailed { .. } => "generation_failed",
            Error::NotATorus => "not_a_torus",
            Error::NotRegular(_) => "not_regular",
            Error::TooLarge { .. } => "too_large",
            Error::SingularSystem => "singular_system",
            Error::ConvergenceFailure { .. } => "convergence_failure",
            Error::PartitionMismatch(_) => "partition_mismatch",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::NoCrossingWithinCap { .. } => "no_crossing_within_cap",
            Error::DomainError(_) => "domain_error",
            Error::BudgetTooSmall(_) => "budget_too_small",
            Error::RegimeUnspecified(_) => "regime_unspecified",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}

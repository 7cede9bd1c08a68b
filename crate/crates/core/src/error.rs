use thiserror::Error;

/// Errors raised at the library boundary.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QdynError {
    #[error("n must be ≥ 2 (got {n})")]
    DimensionTooSmall { n: usize },

    #[error("theta[{index}] = {value} must be finite and > 0")]
    NonPositiveRate { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("x[{index}] = {value} must be finite and ≥ 0")]
    InvalidState { index: usize, value: f64 },

    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    DimensionOverCap { n: usize, cap: usize },

    #[error("invalid support mask: {0}")]
    InvalidSupport(String),

    #[error("support mask must be nonempty")]
    EmptySupport,

    #[error("region {region} is not defined for these rates: {reason}")]
    RegionNotApplicable { region: &'static str, reason: String },

    #[error("unstable line is vertical (2·theta1 = theta2)")]
    VerticalLine,

    #[error("interior fixed point is infeasible (some coordinate < 0)")]
    InfeasibleInterior,

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NotConverged { iterations: usize },

    #[error("the origin is excluded (every Jacobian entry vanishes there)")]
    OriginExcluded,

    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, QdynError>;

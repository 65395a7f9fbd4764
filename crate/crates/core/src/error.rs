use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NahmError {
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid metric jet: {0}")]
    InvalidMetricJet(String),

    #[error("invalid frame model: {0}")]
    InvalidFrame(String),

    #[error("jets needed through order {needed}, only available through {available}")]
    InsufficientOrder { needed: usize, available: usize },

    #[error("truncation order {0} is too low (need at least 2)")]
    OrderTooLow(i32),

    #[error("radial component does not vanish at the boundary (not adapted at infinity)")]
    NotAdapted,

    #[error("series leading coefficient is not invertible")]
    NotInvertible,

    #[error("integration failed at x = {x}: {reason}")]
    IntegrationFailure { x: f64, reason: String },

    #[error("x = {x} is outside the trajectory grid [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("x = {0} is not a node of the trajectory grid")]
    NotOnGrid(f64),

    #[error("least-squares design matrix is rank deficient")]
    RankDeficient,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, NahmError>;

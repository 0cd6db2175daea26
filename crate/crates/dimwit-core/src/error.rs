use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid probability table: {0}")]
    InvalidTable(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("operation requires a dichotomic scenario: {0}")]
    NotDichotomic(String),
    #[error("malformed strategy: {0}")]
    MalformedStrategy(String),
    #[error("strategy space of {total} deterministic strategies exceeds cap {cap}")]
    StrategySpaceTooLarge { total: u128, cap: u128 },
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature grid too coarse: estimated error {estimate:.3e} exceeds {tolerance:.3e}")]
    QuadratureTooCoarse { estimate: f64, tolerance: f64 },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("cutoff must be at least 1")]
    InvalidCutoff,
    #[error("input must not be empty")]
    EmptyInput,
    #[error("opportunity weight must be finite and non-negative, got {0}")]
    InvalidWeight(f64),
}

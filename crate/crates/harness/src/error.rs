use thiserror::Error;

/// Top-level error for pipeline orchestration and the CLI boundary.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Store(#[from] crate::store::StoreError),
    #[error(transparent)]
    Acquire(#[from] crate::corpus::AcquireError),
    #[error(transparent)]
    Engine(#[from] crate::engines::EngineError),
    #[error(transparent)]
    Judge(#[from] crate::judge::JudgeError),
    #[error(transparent)]
    Metrics(#[from] riseval_metrics::MetricsError),
    #[error(transparent)]
    Report(#[from] crate::report::ReportError),
}

use thiserror::Error;

/// Everything that can go wrong outside of a verdict.
///
/// Metric violations, failing diagrams and failing admissibility conditions
/// are reported as data by the individual checks, not through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("out of window: {0}")]
    OutOfWindow(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn malformed<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Malformed(msg.into()))
}

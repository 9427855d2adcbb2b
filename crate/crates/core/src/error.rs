use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A law, process or experiment was configured with invalid parameters.
    #[error("configuration error: {0}")]
    Config(String),
    /// A process state violated one of its structural invariants.
    #[error("state corruption: {0}")]
    Corruption(String),
    /// A density is infinite at the requested point.
    #[error("density is infinite: coordinate {index} is 0 with parameter {param} < 1")]
    InfiniteDensity { index: usize, param: f64 },
    /// An estimator was called without data.
    #[error("empty input to {0}")]
    Empty(&'static str),
    /// A replica of an experiment failed.
    #[error("replica {replica} failed: {source}")]
    Replica {
        replica: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

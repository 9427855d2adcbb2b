use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Missing, unknown or out-of-range setting.
    #[error("{0}")]
    Config(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot create {}: {source}", path.display())]
    Create { path: PathBuf, source: io::Error },
    /// Output failed; `rows` data rows were handed to the writer before that.
    #[error("write failed after {rows} rows: {source}")]
    PartialWrite { rows: usize, source: io::Error },
    #[error(transparent)]
    Core(#[from] diminishing::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

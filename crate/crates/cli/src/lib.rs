//! Command-line harness around `cfex-core`: instance files, the spec
//! mini-languages, oracle verification, benchmark sweeps and their plots.

use std::path::PathBuf;

pub mod bench;
pub mod format;
pub mod report;
pub mod spec;
pub mod svg;
pub mod verify;

/// Process exit codes.
pub mod exit {
    pub const OPTIMAL: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const INFEASIBLE: u8 = 2;
    pub const BUDGET: u8 = 3;
    pub const CEILING: u8 = 4;
    pub const DISAGREE: u8 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cfex_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Core(cfex_core::Error::CeilingExceeded { .. }) => exit::CEILING,
            _ => exit::USAGE,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub fn write_file(path: &std::path::Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.to_owned(), source })
}

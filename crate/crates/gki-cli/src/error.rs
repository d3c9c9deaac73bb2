//! Command-line failure modes and their exit codes.

use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flag/file combination or malformed config entry.
    #[error("config: {0}")]
    Config(String),

    /// Filesystem problem, tagged with the path involved.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Error propagated from the interpolation library.
    #[error(transparent)]
    Lib(#[from] gki::Error),

    /// Artifacts were written but some queries could not be banded; the
    /// failing pixels are enumerated on stderr.
    #[error("{failed} of {total} queries failed")]
    PartialBand { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::PartialBand { .. } => ExitCode::from(3),
            _ => ExitCode::from(1),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

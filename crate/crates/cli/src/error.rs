//! CLI error type and its mapping onto process exit codes.

use std::path::PathBuf;

use thiserror::Error;

/// Exit code for command-line usage errors reported by the argument parser.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] gcor_core::Error),
}

impl CliError {
    /// Process exit code: 2 I/O, 3 parse, 4 empty sample, 5 empty grid,
    /// 6 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } | Self::Write(_) => 2,
            Self::Parse(_) => 3,
            Self::Core(gcor_core::Error::EmptySample) => 4,
            Self::Core(gcor_core::Error::EmptyGrid) => 5,
            Self::Core(_) => 6,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

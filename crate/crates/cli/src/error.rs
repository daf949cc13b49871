use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A configuration value is malformed or violates a constraint. `origin`
    /// says where it came from: `line N` of the config file, the command
    /// line, or `defaults`.
    #[error("config error: `{key}` ({origin}): {msg}")]
    Config {
        key: String,
        origin: String,
        msg: String,
    },
    #[error("config syntax error at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Core(#[from] cocontagion::Error),
}

impl CliError {
    /// Process exit status: 2 for bad input, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::Syntax { .. } | Self::Read { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

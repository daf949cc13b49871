use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or graph specification violates its constraints.
    #[error("configuration error: {0}")]
    Config(String),
    /// An API was called with arguments outside its domain (e.g. a node index out of range).
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

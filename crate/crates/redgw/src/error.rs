use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("fixture conflict for {key}: fixture {fixture}, computed {computed}")]
    FixtureConflict { key: String, fixture: Box<Rat>, computed: Box<Rat> },
    #[error("cache format version {found} does not match expected {expected}")]
    VersionMismatch { found: String, expected: String },
    #[error("cache line {line}: {msg}")]
    CacheLine { line: usize, msg: String },
    #[error("i/o: {0}")]
    Io(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Error {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

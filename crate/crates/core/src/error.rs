use std::fmt;

use thiserror::Error;

/// A malformed literal or record field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError(String);

impl ParseError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("step bound {t} is beyond the database step budget {max}")]
    BeyondBudget { t: u64, max: u64 },
    #[error("machine version mismatch: expected {expected}, found {found}")]
    VersionMismatch { expected: String, found: String },
    #[error("kraft checksum mismatch: header says {header}, records sum to {computed}")]
    ChecksumMismatch { header: String, computed: String },
    #[error("malformed database line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("no halting database cached for n={n}, condition={condition}; run `aitlab enumerate` first")]
    MissingDb { n: u32, condition: String },
    #[error("omega prefix {0} exceeds the final halting mass")]
    InvalidPrefix(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

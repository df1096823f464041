use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the corpus pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("{path}: {source}")]
    File { path: PathBuf, source: io::Error },

    #[error("json error at line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },

    #[error("invalid dump descriptor: {0}")]
    Descriptor(String),

    #[error("project absent for language: {url}")]
    AbsentProject { url: String },

    #[error("network error after {attempts} attempt(s): {message}")]
    Network { attempts: u32, message: String },

    #[error("integrity error for {path}: expected {expected} bytes, got {actual}")]
    Integrity { path: PathBuf, expected: u64, actual: u64 },

    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("truncated archive after {pages_emitted} page(s): {message}")]
    TruncatedArchive { pages_emitted: u64, message: String },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("missing signature for page {0}")]
    MissingSignature(u64),

    #[error("empty corpus: no tokens to profile")]
    EmptyCorpus,

    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage { stage: String, source: Box<Error> },
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors surfaced by the library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: wrong lengths, bad indices, unparsable files.
    #[error("usage error: {0}")]
    Usage(String),

    /// The model is constant, so no instance can flip its value.
    #[error("model is constant; no counterfactual exists")]
    NoCounterfactual,

    /// A brute-force tool was asked to handle an input beyond its size cap.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// An internal invariant broke. Usually means the oracle is impure or
    /// not actually monotone.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON at line {line}, column {column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        }
    }
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoCounterfactual => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn invariant(msg: impl Into<String>) -> Error {
    Error::InvariantViolation(msg.into())
}

use std::path::PathBuf;

/// Errors raised anywhere in the decoding and evaluation stack.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller broke an operation's precondition (length mismatch, NaN, out-of-range value).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Bad user-supplied data: empty corpus, malformed dataset line, id mismatch.
    #[error("invalid input: {0}")]
    Input(String),

    /// A remote scorer or backend could not be reached or returned garbage.
    #[error("transport error talking to {endpoint}: {detail}")]
    Transport { endpoint: String, detail: String },

    /// Backend failure during autoregressive decoding.
    #[error("decode step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    /// Failure while generating one member of an interpretation set.
    #[error("interpretation {index}: {source}")]
    Interpretation {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// A run configuration field is missing, malformed, or inconsistent with another field.
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit status for this error: 2 config, 3 I/O, 4 bad input, 5 contract or metric
    /// failure, 6 transport.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config { .. } => 2,
            Error::Io { .. } => 3,
            Error::Input(_) | Error::Json(_) => 4,
            Error::Contract(_) => 5,
            Error::Transport { .. } => 6,
            Error::Step { .. } | Error::Interpretation { .. } => unreachable!("root() unwraps wrappers"),
        }
    }

    /// Innermost error, looking through step/interpretation wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } | Error::Interpretation { source, .. } => source.root(),
            other => other,
        }
    }
}

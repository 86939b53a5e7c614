use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is not valid UTF-8 at byte {position}")]
    InvalidEncoding { position: usize },

    #[error("vocabulary is empty")]
    EmptyVocabulary,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("word `{0}` has an all-zero DIVE row and no senses")]
    NoSenses(String),

    #[error("basis {0} has an all-zero column")]
    ZeroColumn(usize),

    #[error("no usable context tokens")]
    EmptyContext,

    #[error("unknown word `{0}`")]
    UnknownWord(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("word `{word}` has {found} mentions, at least {required} required")]
    InsufficientMentions {
        word: String,
        found: usize,
        required: usize,
    },

    #[error("degenerate pseudoword: {0}")]
    DegeneratePseudoword(String),

    #[error("{path}:{line}: {message}")]
    Schema {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn schema(path: &std::path::Path, line: usize, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}: file is not valid UTF-8", path.display())]
    Encoding { path: PathBuf },

    #[error("{}: malformed document: {message}", path.display())]
    Malformed { path: PathBuf, message: String },

    #[error("{}: duplicate owner name {name:?}", path.display())]
    DuplicateOwner { path: PathBuf, name: String },

    #[error("{}:{line}: {message}", path.display())]
    Conll {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid tag {0:?}")]
    InvalidTag(String),

    #[error("invalid label {0:?}")]
    InvalidLabel(String),

    #[error("span [{start}, {end}) {surface:?} does not overlap any token")]
    SpanWithoutTokens {
        start: usize,
        end: usize,
        surface: String,
    },

    #[error("tag count {tags} does not match token count {tokens}")]
    TagCountMismatch { tags: usize, tokens: usize },

    #[error("token mismatch in sentence {sentence}: {detail}")]
    TokenMismatch { sentence: usize, detail: String },

    #[error("invalid split ratios: {0}")]
    InvalidSplit(String),

    #[error("invalid owner name {0:?}")]
    InvalidOwner(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the filesystem rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

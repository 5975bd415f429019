use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sentence {sentence}: {message}")]
    InvalidSentence { sentence: String, message: String },

    #[error("token {index} ({form:?}) has no lemma")]
    MissingLemma { index: usize, form: String },

    #[error("token {index} ({form:?}) has malformed compound segmentation {value:?}")]
    MalformedCompound { index: usize, form: String, value: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("length mismatch: {left} hypotheses vs {right} references")]
    LengthMismatch { left: usize, right: usize },

    #[error("dangling continuation marker at end of line: {0:?}")]
    DanglingMarker(String),

    #[error("mixed stage needs {required} synthetic pairs but only {available} are available")]
    InsufficientSynthetic { required: usize, available: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Embedding or model file could not be parsed into a consistent object.
    #[error("load error: {0}")]
    Load(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Training or labeled data is unusable (unknown label, empty set, ...).
    #[error("data error: {0}")]
    Data(String),

    /// Label maps, synthetic specs and run configs.
    #[error("configuration error: {0}")]
    Config(String),

    /// Incompatible model architectures or matrix dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("empty utterance")]
    EmptyUtterance,

    #[error("missing topic assignment for turn {turn} ({side})")]
    MissingTopic { turn: usize, side: &'static str },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

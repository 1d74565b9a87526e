use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode or encode image {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("invalid json in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{what}: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        what: String,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("label rectangle has zero area")]
    DegenerateRect,

    #[error("no feasible placement: label {label_width}x{label_height} does not fit in a {width}x{height} image")]
    NoFeasiblePlacement {
        width: usize,
        height: usize,
        label_width: u32,
        label_height: u32,
    },

    #[error("all tendency factors are zero, prior weights are undefined")]
    DegeneratePrior,

    #[error("manifest error at `{field}`: {message}")]
    Manifest { field: String, message: String },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty dataset: {0}")]
    EmptyDataset(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn manifest(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Manifest {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn dims(what: impl Into<String>, expected: (usize, usize), found: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            found,
        }
    }
}

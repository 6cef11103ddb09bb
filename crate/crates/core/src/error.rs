use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("triangulation needs at least 3 distinct points, got {0}")]
    TooFewPoints(usize),
    #[error("all points are collinear")]
    AllCollinear,
    #[error("triangle mesh has no triangles")]
    EmptyMesh,
    #[error("malformed SVG: {0}")]
    MalformedSvg(String),
    #[error("unsupported SVG path command '{0}'")]
    UnsupportedCommand(char),
    #[error("sketch contains no strokes")]
    EmptySketch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite loss at iteration {iteration}")]
    NonFiniteLoss { iteration: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid checkpoint: {0}")]
    Checkpoint(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

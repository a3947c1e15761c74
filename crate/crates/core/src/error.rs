use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("weights sum to zero")]
    ZeroWeightSum,

    #[error("degenerate control point configuration: {0}")]
    DegenerateConfiguration(&'static str),

    #[error("invalid control points: {0}")]
    InvalidControlPoints(String),

    #[error("image is {actual_w}x{actual_h} but warp grid expects {expected_w}x{expected_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        actual_w: usize,
        actual_h: usize,
    },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("ground truth is empty")]
    EmptyGroundTruth,

    #[error("character {0:?} is not in the glyph alphabet")]
    UnknownCharacter(char),

    #[error("text of {chars} characters does not fit in a {width}x{height} image")]
    DoesNotFit {
        chars: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid transcript: {0}")]
    InvalidTranscript(String),

    #[error("glyph table: {0}")]
    GlyphTable(String),

    #[error("manifest {path}:{line}: {msg}")]
    Manifest {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

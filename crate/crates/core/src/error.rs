use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the extraction and analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed RVF1 header, line {line}: {message}")]
    Header { line: usize, message: String },

    #[error("RVF1 payload at byte {offset}: {message}")]
    Payload { offset: usize, message: String },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("mask value {value} at voxel {index} is not 0 or 1")]
    MaskDomain { index: usize, value: f64 },

    #[error("volume and mask grids differ: {0}")]
    GridMismatch(String),

    #[error("the volume of interest is empty")]
    EmptyVoi,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("structuring element is empty")]
    EmptyStructuringElement,

    #[error("matrix is not normalized (sum = {0})")]
    Unnormalized(f64),

    #[error("not enough observations: {0}")]
    InsufficientData(String),

    #[error("{0}")]
    Table(String),

    #[error("{0}")]
    Manifest(String),

    #[error("{0}")]
    Analysis(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

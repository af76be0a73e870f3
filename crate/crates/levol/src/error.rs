//! Error type shared by all modules.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("position ({}) outside grid bounds [({}), ({})]",
        fmt_point(.position), fmt_point(.min), fmt_point(.max))]
    OutOfDomain {
        position: Vec<f64>,
        min: Vec<f64>,
        max: Vec<f64>,
    },

    #[error("time {t} outside time axis [{t_start}, {t_end}]")]
    OutOfTimeRange { t: f64, t_start: f64, t_end: f64 },

    #[error("scalar attribute index {index} out of range ({count} attributes)")]
    UnknownAttribute { index: usize, count: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid {what}: {reason}")]
    InvalidData { what: String, reason: String },

    #[error("trajectory has no samples")]
    EmptyTrajectory,

    #[error("degenerate neighborhood at node {node}: no neighbors along axis {axis}")]
    DegenerateNeighborhood { node: usize, axis: usize },

    #[error("field too small for ridge extraction: dims {dims:?} (need at least 3 nodes per axis)")]
    FieldTooSmall { dims: Vec<usize> },

    #[error("ridge set is empty")]
    EmptySet,

    #[error("{path}: malformed header: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },

    #[error("{path}: body size mismatch: expected {expected} bytes, found {actual}")]
    SizeMismatch {
        path: PathBuf,
        expected: usize,
        actual: usize,
    },

    #[error("{path}:{line}: malformed row: {reason}")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("degenerate value range: min {min} is not below max {max}")]
    DegenerateRange { min: f64, max: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid_data(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidData {
            what: what.into(),
            reason: reason.into(),
        }
    }
}

fn fmt_point(p: &[f64]) -> String {
    p.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

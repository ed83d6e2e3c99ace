use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the contour monitoring pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient sample: need at least {needed}, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("grid mismatch: expected {expected} points, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("grid mismatch: {reference} has {expected} points but {} differ", format_paths(.offenders))]
    SampleGrid {
        reference: PathBuf,
        expected: usize,
        offenders: Vec<(PathBuf, usize)>,
    },

    #[error("missing input: {0}")]
    MissingInput(PathBuf),

    #[error("mesh is not watertight; open chain ends at {}", format_gaps(.gaps))]
    NonWatertight { gaps: Vec<[f64; 2]> },

    #[error("degenerate contour: {0}")]
    DegenerateContour(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("malformed STL: {0}")]
    Stl(String),

    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_gaps(gaps: &[[f64; 2]]) -> String {
    gaps.iter()
        .map(|[x, y]| format!("({x:.6}, {y:.6})"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn format_paths(items: &[(PathBuf, usize)]) -> String {
    items
        .iter()
        .map(|(p, n)| format!("{} ({n} points)", p.display()))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, AsiError>;

#[derive(Debug, Error)]
pub enum AsiError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("divergence undefined: p[{index}] > 0 while q[{index}] = 0")]
    DivergenceUndefined { index: usize },

    #[error("insufficient data: need at least {needed} values, got {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("class index {index} out of range for {classes} classes")]
    ClassIndex { index: usize, classes: usize },

    #[error("non-finite value {what} at row {row}, column {col}")]
    NonFinite {
        what: &'static str,
        row: usize,
        col: usize,
    },

    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: shape mismatch: {msg}")]
    Shape { path: PathBuf, msg: String },

    #[error("{path}: row {row} sums to {sum}, expected 1 within 1e-6")]
    Unnormalized { path: PathBuf, row: usize, sum: f64 },

    #[error("{path}: manifest error: {msg}")]
    Manifest { path: PathBuf, msg: String },

    #[error("{path}: corrupt checkpoint: {msg}")]
    Checkpoint { path: PathBuf, msg: String },

    #[error("unsupported attribution source: {0}")]
    UnsupportedSource(String),

    #[error("incompatible comparison: {0}")]
    IncompatibleComparison(String),

    #[error("degenerate projection: {0}")]
    DegenerateProjection(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AsiError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AsiError::Io {
            path: path.into(),
            source,
        }
    }

    /// I/O failures map to exit code 2 in the CLI; everything else is a
    /// validation failure.
    pub fn is_io(&self) -> bool {
        matches!(self, AsiError::Io { .. })
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration failed after {subdivisions} subdivisions (error estimate {error:.3e}, tolerance {tol:.3e})")]
    IntegrationFailure {
        subdivisions: usize,
        error: f64,
        tol: f64,
    },

    #[error("estimator `{estimator}` requires adjoint products, which this operator does not provide")]
    MissingAdjoint { estimator: &'static str },

    #[error("degenerate draw: ||A x|| = 0 (seed {seed}, stream {stream_id})")]
    DegenerateDraw { seed: u64, stream_id: u64 },

    #[error("{count} of {total} trials hit degenerate draws (first seed {seed}, streams {streams:?})")]
    DegenerateBatch {
        count: usize,
        total: usize,
        seed: u64,
        streams: Vec<u64>,
    },

    #[error("matrix of size {rows}x{cols} exceeds the dense SVD cap of {cap}")]
    TooLarge { rows: usize, cols: usize, cap: usize },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("shape mismatch in {path}: {message}")]
    ShapeMismatch { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("output {path} already exists; pass --force to overwrite")]
    OutputExists { path: PathBuf },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("no convergence in {what} after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

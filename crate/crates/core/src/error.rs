use std::path::PathBuf;

/// Errors raised by the toolkit.
///
/// Variants are split so that callers (the CLI in particular) can tell bad
/// input apart from internal failures.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("bar {index} has a non-finite endpoint ({birth}, {death})")]
    NonFiniteEndpoint { index: usize, birth: f64, death: f64 },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("Gram matrix eigenvalue {value:e} is below the PSD roundoff floor")]
    NotPositiveSemidefinite { value: f64 },

    #[error("unsupported exponent p = {0}")]
    UnsupportedExponent(f64),

    #[error("input of size {size} exceeds the brute-force limit of {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("point cloud has {points} points; H1 persistence is capped at {cap}, subsample first")]
    TooManyPoints { points: usize, cap: usize },

    #[error("requested {k} clusters from {n} samples")]
    TooManyClusters { k: usize, n: usize },

    #[error("label sequences differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unsupported WAV encoding in {path}: {found}")]
    UnsupportedWav { path: PathBuf, found: String },

    #[error("WAV error in {path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True when the error was caused by the caller's input rather than an
    /// internal failure.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::NotPositiveSemidefinite { .. } | Error::Json(_) => false,
            Error::Stage { source, .. } => source.is_input_error(),
            _ => true,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

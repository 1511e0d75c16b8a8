use std::path::PathBuf;

use thiserror::Error;

use crate::data::QuarterIndex;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, row {row}: malformed quarter date `{text}` (expected YYYYQn)")]
    MalformedDate { path: PathBuf, row: usize, text: String },
    #[error("{path}, row {row}: gap in quarterly series, expected {expected}")]
    QuarterGap { path: PathBuf, row: usize, expected: QuarterIndex },
    #[error("{path}, row {row}: duplicate or decreasing quarter {found}")]
    QuarterOrder { path: PathBuf, row: usize, found: QuarterIndex },
    #[error("{path}, row {row}: non-numeric value `{text}`")]
    NonNumeric { path: PathBuf, row: usize, text: String },
    #[error("{path}: {message}")]
    BadFile { path: PathBuf, message: String },
    #[error("invalid series `{name}`: {message}")]
    InvalidSeries { name: String, message: String },
    #[error("missing input series `{0}`")]
    MissingSeries(String),
    #[error("series `{name}` has a nonpositive level {value} at {at}; cannot take logs")]
    NonPositive { name: String, at: QuarterIndex, value: f64 },
    #[error("series `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("series spans do not overlap: {0}")]
    EmptyIntersection(String),

    #[error("FRED_API_KEY is not set; use the CSV snapshot instead")]
    MissingApiKey,
    #[error("FRED request for `{series}` failed with HTTP {status}: {message}")]
    Http { series: String, status: u16, message: String },
    #[error("FRED transport error for `{series}`: {message}")]
    Transport { series: String, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("instrument {column} at lag {lag} is not predetermined: {reason}")]
    InstrumentNotExogenous { column: String, lag: usize, reason: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("empty estimation sample: {0}")]
    EmptySample(String),
    #[error("unsupported degrees of freedom: k_z = {kz}, k_x = {kx}")]
    UnsupportedDf { kz: usize, kx: usize },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("no qLL-S critical value for k_z = {kz}, k_x = {kx}, level = {level}")]
    MissingCriticalValue { kz: usize, kx: usize, level: f64 },
    #[error("evaluator failed on {failed} of {total} grid points; first error: {first}")]
    GridAborted { failed: usize, total: usize, first: String },

    #[error("{path}, line {line}: {message}")]
    Config { path: PathBuf, line: usize, message: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

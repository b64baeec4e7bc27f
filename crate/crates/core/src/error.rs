use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures of the binary activation format, each with its own code.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic bytes {found:?}, expected \"TLNS\"")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported format version {found} (supported: {supported})")]
    VersionMismatch { found: u16, supported: u16 },
    #[error("unsupported dtype tag {0}")]
    UnsupportedDtype(u8),
    #[error("header field out of range: {0}")]
    InvalidHeader(String),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("payload has {extra} trailing bytes")]
    TrailingBytes { extra: u64 },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
}

impl FormatError {
    pub fn code(&self) -> &'static str {
        match self {
            FormatError::BadMagic { .. } => "E_MAGIC",
            FormatError::VersionMismatch { .. } => "E_VERSION",
            FormatError::UnsupportedDtype(_) => "E_DTYPE",
            FormatError::InvalidHeader(_) => "E_HEADER",
            FormatError::Truncated { .. } => "E_TRUNCATED",
            FormatError::TrailingBytes { .. } => "E_TRAILING",
            FormatError::NonFinite { .. } => "E_NONFINITE",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("unsupported homology dimension {0} (only 0 and 1 are supported)")]
    UnsupportedDimension(usize),
    #[error("zero-norm point at index {0} under cosine metric")]
    ZeroNorm(usize),
    #[error("zero-norm rows at indices {0:?}")]
    ZeroNormRows(Vec<usize>),
    #[error("stratification error: {0}")]
    Stratification(String),
    #[error("peak-count error: requested k = {k}, but curves have {first} and {second} peaks")]
    PeakCount { k: usize, first: usize, second: usize },
    #[error("coverage error: missing data for {0:?}")]
    Coverage(Vec<String>),
    #[error("axis error: {0}")]
    Axis(String),
    #[error("{path}: {source} [{code}]", code = .source.code())]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Coarse error categories used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidInput(_) | Error::UnsupportedDimension(_) | Error::Axis(_) => ErrorKind::Usage,
            Error::Format { .. }
            | Error::Manifest(_)
            | Error::Coverage(_)
            | Error::Csv(_)
            | Error::Json(_)
            | Error::Io(_)
            | Error::Size(_) => ErrorKind::Data,
            Error::Domain(_)
            | Error::Degenerate(_)
            | Error::ZeroNorm(_)
            | Error::ZeroNormRows(_)
            | Error::Stratification(_)
            | Error::PeakCount { .. } => ErrorKind::Numerical,
        }
    }

    /// Process exit code: 2 usage, 3 data/format, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Usage => 2,
            ErrorKind::Data => 3,
            ErrorKind::Numerical => 4,
        }
    }
}

use thiserror::Error;

/// Errors produced anywhere in the training, election and I/O pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite feature value at position {position}")]
    NonFinite { position: usize },

    #[error("invalid training parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate binary problem: both labels need at least one example")]
    DegenerateBinaryProblem,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("need at least 2 distinct classes, found {found}")]
    TooFewClasses { found: usize },

    #[error("class {class} has no training examples")]
    MissingClass { class: usize },

    #[error("site {site}: {source}")]
    Site {
        site: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid accuracy matrix: {0}")]
    InvalidMatrix(String),

    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("row {row}: unknown class label {label:?}")]
    UnknownLabel { row: usize, label: String },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("invalid split: {0}")]
    Split(String),

    #[error("model decode failed: {0}")]
    Decode(#[from] DecodeError),

    #[error("resource cap exceeded: {rows} training rows requested, cap is {limit}")]
    ResourceExhausted { rows: usize, limit: usize },

    #[error("training crashed: {0}")]
    Crashed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_site(site: usize, source: Error) -> Self {
        Error::Site {
            site,
            source: Box::new(source),
        }
    }
}

/// Failures when reading a serialized model.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("payload truncated")]
    Truncated,
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("checksum mismatch")]
    ChecksumMismatch,
    #[error("corrupt payload: {0}")]
    Corrupt(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors produced across ingestion, clustering, evaluation and the bench harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("schema line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("schema must declare at least one attribute")]
    EmptySchema,

    #[error("data row {row}, column {column}: {message}")]
    Data {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("data row {row}: expected {expected} columns, found {found}")]
    Arity {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("dataset has no objects")]
    EmptyDataset,

    #[error("attribute {0} is not categorical")]
    NotCategorical(usize),

    #[error("every projection span of attribute {0} is degenerate")]
    DegenerateAttribute(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("label vectors differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn format(what: &'static str, msg: impl Into<String>) -> Self {
        Error::Format {
            what,
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }

    /// True for errors caused by the input data rather than the configuration.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Schema { .. }
                | Error::EmptySchema
                | Error::Data { .. }
                | Error::Arity { .. }
                | Error::EmptyDataset
                | Error::NotCategorical(_)
                | Error::DegenerateAttribute(_)
                | Error::LengthMismatch { .. }
                | Error::Format { .. }
                | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

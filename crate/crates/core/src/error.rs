use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a finite number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("label column `{0}` not found")]
    UnknownLabelColumn(String),

    #[error("attribute column `{0}` not found")]
    MissingAttribute(String),

    #[error("class `{0}` is not one of the known classes")]
    UnknownClass(String),

    #[error("input has no {0}")]
    EmptyInput(&'static str),

    #[error("need at least 2 distinct classes, found {0}")]
    TooFewClasses(usize),

    #[error("class `{class}` has {available} members, {requested} requested")]
    InsufficientClassMembers {
        class: String,
        available: usize,
        requested: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("all labels are equal; nothing to learn")]
    DegenerateLabels,

    #[error("labels must be -1 or +1, found {0}")]
    NonBinaryLabel(f64),

    #[error("rule generation produced no rules")]
    EmptyRuleSet,

    #[error("feature matrix has no nonzero entries")]
    AllZeroFeatures,

    #[error("feature column {0} contains non-finite values")]
    NonFiniteFeature(usize),

    #[error("rankings come from different rule sets")]
    MismatchedRuleUniverse,

    #[error("unsupported model format version {found} (this build reads {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

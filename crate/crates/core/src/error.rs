use thiserror::Error;

/// Errors surfaced by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing value at row {row}, column {col}")]
    MissingValue { row: usize, col: String },
    #[error("non-numeric value {value:?} at row {row}, column {col}")]
    NonNumeric {
        row: usize,
        col: String,
        value: String,
    },
    #[error("duplicate column name {0:?}")]
    DuplicateName(String),
    #[error("file has no header or no rows")]
    EmptyFile,
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("unknown level {level:?} for categorical column {col}")]
    UnknownLevel { col: String, level: String },
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),

    #[error("index {index} out of range for {len} features")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("strata cover {got} rows, dataset has {expected}")]
    StrataLengthMismatch { expected: usize, got: usize },
    #[error("subsample size {k} exceeds population size {n}")]
    KTooLarge { k: usize, n: usize },

    #[error("no admissible split")]
    NoAdmissibleSplit,
    #[error("cannot fit a tree on zero rows")]
    EmptyRows,
    #[error("expected {expected} features, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("row {0} is in-sample for every tree")]
    NoOobCoverage(usize),

    #[error("sampling scheme {0} does not support grouped variance estimation")]
    SchemeUnsupported(String),
    #[error("need at least 2 groups and 2 trees per group, got n_z={n_z}, n_mc={n_mc}")]
    TooFewGroups { n_z: usize, n_mc: usize },
    #[error("confidence level {0} outside (0, 1)")]
    LevelOutOfRange(f64),
    #[error("dimension mismatch: vector has {vector}, matrix has {matrix}")]
    DimensionMismatch { vector: usize, matrix: usize },
    #[error("covariance has no positive eigenvalue")]
    ZeroCovariance,
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("evaluation set is empty")]
    EmptyEval,
    #[error("need at least 99 permutations, got {0}")]
    TooFewPermutations(usize),

    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from bad input rather than a runtime failure.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::NoOobCoverage(_) | Error::ZeroCovariance)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

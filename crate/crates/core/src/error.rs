use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the core pipeline can report.
///
/// Variants carry the offending location (line number, curve or column
/// name) so callers can render an actionable message.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported LAS version {0:?} (only 1.2 and 2.0 are read)")]
    UnsupportedVersion(String),
    #[error("missing required section {0}")]
    MissingSection(&'static str),
    #[error("line {line}: expected {expected} values per row, found {found}")]
    ColumnMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: malformed header line {text:?}")]
    MalformedHeaderLine { line: usize, text: String },
    #[error("line {line}: cannot parse {token:?} as a finite number")]
    BadValue { line: usize, token: String },
    #[error("invalid LAS file: {0}")]
    InvalidFile(String),
    #[error("depth is not monotone at row {row}")]
    NonMonotoneDepth { row: usize },
    #[error("duplicate depth {depth} at row {row}")]
    DuplicateDepth { row: usize, depth: f64 },
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("unknown curve {0:?}")]
    UnknownCurve(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("curve {0:?} already exists")]
    NameCollision(String),
    #[error("invalid mnemonic {0:?}")]
    InvalidMnemonic(String),
    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("no non-missing values")]
    AllMissing,
    #[error("need at least {needed} non-missing values, found {found}")]
    TooFewValues { needed: usize, found: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("pair grid needs at least two curves")]
    MinimumTwo,
    #[error("pair grid supports at most {max} curves, got {got}")]
    TooManyCurves { max: usize, got: usize },
    #[error("histogram edges must be strictly increasing with at least two entries")]
    EdgeMismatch,
    #[error("selection belongs to well {selection:?}, dataset is {dataset:?}")]
    WellMismatch { selection: String, dataset: String },
    #[error("row index {index} out of range for {len} rows")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("feature {0:?} is constant over the complete rows")]
    ConstantFeature(String),
    #[error("no rows with every feature and the target present")]
    NoCompleteRows,
    #[error("need at least {needed} rows, have {found}")]
    TooFewRows { needed: usize, found: usize },
    #[error("normal equations are singular")]
    SingularSystem,
    #[error("classification target must be 0/1, found {0}")]
    NonBinaryTarget(f64),
    #[error("dataset lacks feature curve {0:?}")]
    MissingFeatureCurve(String),
    #[error("nothing to evaluate")]
    EmptyEvaluation,
    #[error("CSV error: {0}")]
    Csv(String),
}

impl Error {
    /// Stable machine-readable code used by the HTTP API and the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnsupportedVersion(_) => "unsupported_version",
            Error::MissingSection(_) => "missing_section",
            Error::ColumnMismatch { .. } => "column_mismatch",
            Error::MalformedHeaderLine { .. } => "malformed_header_line",
            Error::BadValue { .. } => "bad_value",
            Error::InvalidFile(_) => "invalid_file",
            Error::NonMonotoneDepth { .. } => "non_monotone_depth",
            Error::DuplicateDepth { .. } => "duplicate_depth",
            Error::EmptyDataset => "empty_dataset",
            Error::InvalidDataset(_) => "invalid_dataset",
            Error::UnknownCurve(_) => "unknown_curve",
            Error::UnknownColumn(_) => "unknown_column",
            Error::NameCollision(_) => "name_collision",
            Error::InvalidMnemonic(_) => "invalid_mnemonic",
            Error::InvalidRange { .. } => "invalid_range",
            Error::AllMissing => "all_missing",
            Error::TooFewValues { .. } => "too_few_values",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::MinimumTwo => "minimum_two",
            Error::TooManyCurves { .. } => "too_many_curves",
            Error::EdgeMismatch => "edge_mismatch",
            Error::WellMismatch { .. } => "well_mismatch",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::ConstantFeature(_) => "constant_feature",
            Error::NoCompleteRows => "no_complete_rows",
            Error::TooFewRows { .. } => "too_few_rows",
            Error::SingularSystem => "singular_system",
            Error::NonBinaryTarget(_) => "non_binary_target",
            Error::MissingFeatureCurve(_) => "missing_feature_curve",
            Error::EmptyEvaluation => "empty_evaluation",
            Error::Csv(_) => "csv",
        }
    }

    /// Where the problem is, when the error knows: a line number or a name.
    pub fn location(&self) -> Option<String> {
        match self {
            Error::ColumnMismatch { line, .. }
            | Error::MalformedHeaderLine { line, .. }
            | Error::BadValue { line, .. } => Some(format!("line {line}")),
            Error::NonMonotoneDepth { row } | Error::DuplicateDepth { row, .. } => {
                Some(format!("row {row}"))
            }
            Error::UnknownCurve(name)
            | Error::UnknownColumn(name)
            | Error::NameCollision(name)
            | Error::ConstantFeature(name)
            | Error::MissingFeatureCurve(name) => Some(name.clone()),
            Error::MissingSection(s) => Some((*s).to_string()),
            _ => None,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

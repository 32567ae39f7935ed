use thiserror::Error;

pub type Result<T, E = SrlError> = std::result::Result<T, E>;

/// Errors raised anywhere in the fitting and evaluation pipeline.
#[derive(Debug, Error)]
pub enum SrlError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("missing value at observation {index}")]
    MissingValue { index: usize },

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("column {column} has zero variance and was not flagged constant")]
    DegenerateColumn { column: usize },

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("invalid split: {0}")]
    Split(String),

    #[error("every column is unpenalized; the fit reduces to ordinary least squares")]
    NoPath,

    #[error("non-stationary specification: companion spectral radius {spectral_radius:.6} >= 1")]
    NonStationary { spectral_radius: f64 },

    #[error("tuning failed: {0}")]
    Tuning(String),

    #[error("method mismatch: {0}")]
    MethodMismatch(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl SrlError {
    /// Process exit code used by the command-line tool.
    ///
    /// | code | meaning                                  |
    /// |------|------------------------------------------|
    /// | 2    | configuration / usage                    |
    /// | 3    | input data (parse, missing, alignment)   |
    /// | 4    | invalid order or split                   |
    /// | 5    | numerical or fitting failure             |
    /// | 6    | model file format / version              |
    /// | 7    | i/o                                      |
    pub fn exit_code(&self) -> i32 {
        match self {
            SrlError::Config(_) => 2,
            SrlError::Csv(e) if e.is_io_error() => 7,
            SrlError::InvalidInput(_)
            | SrlError::MissingValue { .. }
            | SrlError::Parse { .. }
            | SrlError::Csv(_) => 3,
            SrlError::InvalidOrder(_) | SrlError::Split(_) => 4,
            SrlError::DegenerateColumn { .. }
            | SrlError::ZeroVariance(_)
            | SrlError::NoPath
            | SrlError::NonStationary { .. }
            | SrlError::Tuning(_)
            | SrlError::MethodMismatch(_)
            | SrlError::UndefinedMetric(_) => 5,
            SrlError::ModelFormat(_) | SrlError::Json(_) => 6,
            SrlError::Io(_) => 7,
        }
    }
}

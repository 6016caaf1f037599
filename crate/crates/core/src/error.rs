use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("no usable rows in {0}")]
    EmptyInput(PathBuf),

    #[error("insufficient option chain for {underlier} on {date}: {reason}")]
    InsufficientChain {
        underlier: String,
        date: NaiveDate,
        reason: String,
    },
    #[error("no strike carries both a call and a put quote")]
    Parity,
    #[error("at least two strikes are required, got {0}")]
    TooFewStrikes(usize),
    #[error("variance strip is empty after side filtering")]
    NoStrip,
    #[error("non-positive variance {0:.6e}")]
    NonPositiveVariance(f64),
    #[error("negative interpolated variance: sigma2(T1)={sigma2_near}, sigma2(T2)={sigma2_next}, N1={days_near}, N2={days_next}")]
    NegativeInterpolation {
        sigma2_near: f64,
        sigma2_next: f64,
        days_near: i64,
        days_next: i64,
    },
    #[error("invalid expiry pair N1={0}, N2={1}")]
    ExpiryOrder(i64, i64),
    #[error("{0} has no computable index on any date")]
    NoComputableDays(String),
    #[error("leading gap for {name}: first value on {first}")]
    LeadingGap { name: String, first: NaiveDate },
    #[error("missing market capitalization for {0}")]
    MissingCap(String),

    #[error("sample too short: {0}")]
    SampleTooShort(String),
    #[error("regressors are collinear")]
    Collinear,
    #[error("non-positive value {value} at row {row}, column {col} under log transform")]
    LogDomain { row: usize, col: usize, value: f64 },
    #[error("degenerate variance for variable {0}: sigma_kk = 0")]
    DegenerateVariance(usize),
    #[error("summary mismatch: {0}")]
    SummaryMismatch(String),
    #[error("empty bucket {0}")]
    EmptyBucket(String),

    #[error("insufficient sample: {have} complete rows, need {need}")]
    InsufficientSample { have: usize, need: usize },
    #[error("perfect separation detected (max |beta| = {max_abs_beta:.1})")]
    Separation { max_abs_beta: f64 },
    #[error("probit did not converge in {} iterations", trace.len())]
    NonConvergence { trace: Vec<f64> },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short machine-readable kind, used in JSON error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Csv { .. } => "csv",
            Error::Schema(_) => "schema",
            Error::Format(_) => "format",
            Error::EmptyInput(_) => "empty_input",
            Error::InsufficientChain { .. } => "insufficient_chain",
            Error::Parity => "parity",
            Error::TooFewStrikes(_) => "too_few_strikes",
            Error::NoStrip => "no_strip",
            Error::NonPositiveVariance(_) => "non_positive_variance",
            Error::NegativeInterpolation { .. } => "negative_interpolation",
            Error::ExpiryOrder(..) => "expiry_order",
            Error::NoComputableDays(_) => "no_computable_days",
            Error::LeadingGap { .. } => "leading_gap",
            Error::MissingCap(_) => "missing_cap",
            Error::SampleTooShort(_) => "sample_too_short",
            Error::Collinear => "collinear",
            Error::LogDomain { .. } => "log_domain",
            Error::DegenerateVariance(_) => "degenerate_variance",
            Error::SummaryMismatch(_) => "summary_mismatch",
            Error::EmptyBucket(_) => "empty_bucket",
            Error::InsufficientSample { .. } => "insufficient_sample",
            Error::Separation { .. } => "separation",
            Error::NonConvergence { .. } => "non_convergence",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv { path: path.into(), source }
    }
}

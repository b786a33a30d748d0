use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series too short: {what} needs at least {needed} observations, got {got}")]
    Length {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("frequency error: {0}")]
    Frequency(String),

    #[error("calendar error: {0}")]
    Calendar(String),

    #[error("non-positive value {value} at {period}; logarithm undefined")]
    Domain { period: String, value: f64 },

    #[error("interior missing value at {period}")]
    InteriorGap { period: String },

    #[error("malformed period label '{0}'")]
    Period(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("series are not aligned: {0}")]
    Alignment(String),

    #[error("cannot normalize: {0}")]
    Normalization(String),

    #[error("outlet '{outlet}' has zero standard deviation over its monthly means")]
    DegenerateOutlet { outlet: String },

    #[error("insufficient sample: {0}")]
    Sample(String),

    #[error("collinear regressors: {}", columns.join(", "))]
    Collinear { columns: Vec<String> },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("nonstationary: {0}")]
    Nonstationary(String),

    #[error("unknown variable '{0}'")]
    UnknownVariable(String),

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("bootstrap aborted: {dropped} of {replications} replications failed (last error: {last})")]
    BootstrapAborted {
        dropped: usize,
        replications: usize,
        last: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the error stems from the input data or the model rather
    /// than from how the caller invoked the library.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Parameter(_))
    }
}

use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One problem found while validating a configuration document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    /// JSON path of the offending value, e.g. `environment.instance.costs[2]`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("an instance needs at least one arm")]
    NoArms,
    #[error("noise scale must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("threshold must be finite, got {0}")]
    InvalidThreshold(f64),
    #[error("cost of arm {arm} must be positive and finite, got {value}")]
    InvalidCost { arm: usize, value: f64 },
    #[error("mean of arm {arm} must be finite, got {value}")]
    InvalidMean { arm: usize, value: f64 },
    #[error("arm {arm} has mean {mean} equal to the threshold; zero-gap arms are not supported")]
    ZeroGap { arm: usize, mean: f64 },
    #[error("arm {arm} has never been pulled")]
    UnpulledArm { arm: usize },
    #[error("arm index {arm} out of range for {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },
    #[error("index function `{name}` is undefined at zero pulls")]
    ZeroPulls { name: &'static str },
    #[error("horizon {horizon} is smaller than the number of arms {arms}")]
    HorizonTooShort { horizon: u64, arms: usize },
    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),
    #[error("unknown bound family `{0}`")]
    UnknownBound(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid configuration:\n{}", format_issues(.0))]
    Config(Vec<ConfigIssue>),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  - {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors caused by the user's input rather than the environment.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Csv(_))
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "quadrature did not converge on [{lo}, {hi}]: error estimate {estimate:e} exceeds tolerance {tolerance:e}"
    )]
    QuadratureNonConvergence {
        lo: f64,
        hi: f64,
        estimate: f64,
        tolerance: f64,
    },

    #[error("search frontier exceeded the cap of {cap} nodes (radius too large for this group)")]
    FrontierOverflow { cap: usize },

    #[error("group is flagged free but words {first} and {second} give the same element")]
    NotDiscrete { first: String, second: String },

    #[error("no non-identity element found within word length {max_word_len}")]
    NoNonIdentityFound { max_word_len: usize },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("eigenvalue must be nonnegative, got {0}")]
    NegativeEigenvalue(f64),

    #[error("the Fejer form needs a tempered spectral parameter, got lambda = {0}")]
    UntemperedInput(f64),

    #[error("delta = {0} must lie in (0, 0.01)")]
    DeltaTooLarge(f64),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("invalid value for `{field}`: {reason}")]
    InvalidInput { field: String, reason: String },

    #[error("derivative of g is required for the inverse Abel transform")]
    MissingDerivative,

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid json in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

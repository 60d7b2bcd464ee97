use thiserror::Error;

/// Errors produced by measure construction, surrogate fitting, bound evaluation
/// and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("non-positive weight {value} at index {index}")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("function is not finite at node {node:?} (value {value})")]
    NonFiniteAtNode { node: Vec<f64>, value: f64 },

    #[error("point {point:?} lies outside the domain")]
    OutOfDomain { point: Vec<f64> },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("singular system at row {0}")]
    Singular(usize),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("derivative {derivative:e} too small at x = {x} (y = {y})")]
    NearFlat { x: f64, y: f64, derivative: f64 },

    #[error("not enough usable points for a rate fit: {0} (need 3)")]
    TooFewPoints(usize),

    #[error("config: {0}")]
    Config(String),

    #[error("expression: {0}")]
    Expression(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<std::path::PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

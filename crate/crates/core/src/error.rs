use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what}: argument {value} outside the domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("{what}: result overflows f64 for argument {value}")]
    Overflow { what: &'static str, value: f64 },

    #[error("{what}: Gaussian-ratio approximation invalid (denominator mean {mean} < 5 x std {std})")]
    RatioValidity { what: &'static str, mean: f64, std: f64 },

    #[error("degenerate sweep: {0}")]
    Degenerate(String),

    #[error("placement list is empty")]
    EmptyPlacements,

    #[error("too many placements: {got} > K = {k}")]
    TooManyPlacements { got: usize, k: usize },

    #[error("invalid placement: {0}")]
    InvalidPlacement(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

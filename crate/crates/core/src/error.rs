use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("undefined extended-real sum: +inf + -inf")]
    InfiniteCancellation,

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid grid spec: {0}")]
    InvalidGrid(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("normal cone requested for a region that is not closed")]
    OpenRegionNormalCone,

    #[error("malformed operator: {0}")]
    MalformedOperator(String),

    #[error("linear operator is not monotone: symmetric part has eigenvalue {min_eigenvalue:e}")]
    NonMonotoneLinear { min_eigenvalue: f64 },

    #[error("LP numerical failure: {0}")]
    LpNumerical(String),

    #[error("function is not in the representative class (h < c at {witness})")]
    NotRepresentativeClass { witness: String },

    #[error("unsatisfied hypothesis: {0}")]
    UnsatisfiedHypothesis(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown gallery scenario `{0}`")]
    UnknownScenario(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

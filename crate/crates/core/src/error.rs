use thiserror::Error;

/// Errors raised by the geometry, quadrature, solver and reconstruction layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),

    #[error("reference horocycle must be the plane x_n = 1, got {0}")]
    NotNormalized(String),

    #[error("non-integrable configuration: decay order {declared} is below the required {required}")]
    NonIntegrable { declared: f64, required: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("overflow evaluating |f| e^(m d) at {0}")]
    Overflow(String),

    #[error("singular step at node {index} (s = {s}): 1 + h K(s,s)/2 = {value:e}")]
    SingularStep { index: usize, s: f64, value: f64 },

    #[error("diagonal degeneracy at node {index} (s = {s}): |K(s,s)| = {value:e}")]
    DiagonalDegeneracy { index: usize, s: f64, value: f64 },

    #[error("incompatible data: |f(a)| = {value:e} exceeds tolerance {tolerance:e}")]
    IncompatibleData { value: f64, tolerance: f64 },

    #[error("grid too coarse: {nodes} nodes, at least {required} required")]
    GridTooCoarse { nodes: usize, required: usize },

    #[error("data too coarse for reduction: {0}")]
    DataTooCoarse(String),

    #[error("support claim violated: f({point}) = {value:e}")]
    SupportClaimViolated { point: String, value: f64 },

    #[error("frequency #{index}: {source}")]
    Frequency {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed dataset (line {line}): {message}")]
    Format { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn at_frequency(self, index: usize) -> Self {
        Error::Frequency {
            index,
            source: Box::new(self),
        }
    }
}

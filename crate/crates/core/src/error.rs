use thiserror::Error;

/// Errors raised by state construction, the separability tests, the Bell
/// machinery and the scanners.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weight {index} is not finite")]
    NonFiniteWeight { index: usize },

    #[error("expected {expected} entries, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("all weights are zero")]
    AllZero,

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace {0} differs from 1")]
    TraceMismatch(f64),

    #[error("operation requires n = 4, got n = {0}")]
    WrongN(usize),

    #[error("dense construction for n = {n} exceeds the cap of {cap} qubits")]
    SizeCap { n: usize, cap: usize },

    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("no grid point satisfies the predicate `{0}`")]
    NotFound(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

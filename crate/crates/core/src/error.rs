use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polytope has dimension 0")]
    ZeroDimension,

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("polytope is empty or not full-dimensional")]
    EmptyInterior,

    #[error("constraints {first} and {second} are identical after normalization")]
    DuplicateConstraint { first: usize, second: usize },

    #[error("Handelman degree {t} is below the polynomial degree {degree}")]
    DegreeTooLow { t: u32, degree: u32 },

    #[error("no Handelman certificate found up to degree {last_t}")]
    CertificateNotFound { last_t: u32 },

    #[error("certificate does not reproduce f + s")]
    UnverifiedCertificate,

    #[error("polytope is not a simplex ({facets} facets in dimension {dim})")]
    NotSimplex { facets: usize, dim: usize },

    #[error("grid P ∩ (1/{m})Z^d is empty")]
    EmptyGrid { m: u64 },

    #[error("mean of f^{k} is negative; no real root for even k")]
    NegativeMean { k: u32 },

    #[error("{what} must be positive")]
    NonPositive { what: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

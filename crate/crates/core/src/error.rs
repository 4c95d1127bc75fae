use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable-space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("truncation too low: result needed to weighted order {requested}, inputs determine it only to {available}")]
    TruncationTooLow { requested: u32, available: i64 },

    #[error("variable space has no mirrored block for {0}")]
    NotMirrored(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty family")]
    EmptyFamily,

    #[error("family member {index} is not homogeneous of degree {degree}")]
    DegreeMismatch { index: usize, degree: u32 },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("point is not on the quadric: {0}")]
    NotOnQuadric(String),

    #[error("map is not CR transversal at the base point: {0}")]
    NotTransversal(String),

    #[error("linear part does not preserve the Hermitian form: {0}")]
    NotIsometric(String),

    #[error("sigma = -1: compose with the signature swap before normalizing")]
    NeedsSignatureSwap,

    #[error("map is not in normal form: {0}")]
    NotNormalForm(String),

    #[error("component scales cannot be combined without leaving Q(i): {0}")]
    IrrationalScale(String),

    #[error("polynomial is not exact (truncated at weighted order {0})")]
    NotExact(u32),

    #[error("series is not invertible: constant term is zero")]
    NotInvertible,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the error reports a failed mathematical condition on valid
    /// input rather than malformed input.
    pub fn is_check_failure(&self) -> bool {
        matches!(
            self,
            Error::NotOnQuadric(_)
                | Error::NotTransversal(_)
                | Error::NotIsometric(_)
                | Error::NeedsSignatureSwap
                | Error::NotNormalForm(_)
                | Error::IrrationalScale(_)
                | Error::NotInvertible
        )
    }
}

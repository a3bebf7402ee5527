use thiserror::Error;

/// Errors raised by the structure-building and checking routines.
///
/// Failing *checks* are not errors: they come back as [`crate::Verdict::Fail`]
/// with a witness. Errors are reserved for malformed inputs and violated
/// preconditions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid variable space: {0}")]
    InvalidSpace(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("not antisymmetric at ({i}, {j}): sum is {witness}")]
    NotAntisymmetric { i: usize, j: usize, witness: String },
    #[error("rank deficient: {0}")]
    RankDeficient(String),
    #[error("{which} is not admissible (first failure at derivative order {order})")]
    Inadmissible { which: String, order: usize },
    #[error("covector is not in the coflat span (residual {0})")]
    NotInCoflat(String),
    #[error("not Poisson: {0}")]
    NotPoisson(String),
    #[error("invalid structure constants: {0}")]
    InvalidConstants(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

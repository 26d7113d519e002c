//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum UnitalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields: {0} vs {1}")]
    DomainMismatch(String, String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime modulus {0} exceeds 2^31")]
    PrimeTooLarge(u64),
    #[error("variable name collision: {0}")]
    NameCollision(String),
    #[error("empty variable list for field extension")]
    EmptyExtension,
    #[error("ambient ring mismatch: {0}")]
    AmbientMismatch(String),
    #[error("missing substitution image for variable {0}")]
    MissingImage(String),
    #[error("substitution denominator vanishes: {0}")]
    VanishingDenominator(String),
    #[error("element is not a unit: {0}")]
    NotAUnit(String),
    #[error("denominator is not a unit of the target ring: {0}")]
    DenominatorNotUnit(String),
    #[error("inverted element lies in the relation ideal: {0}")]
    InvertedInIdeal(String),
    #[error("relation ideal contains 1 (presented ring is the zero ring)")]
    UnitIdeal,
    #[error("parse error at line {line}, col {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("hint rejected: {0}")]
    HintRejected(String),
    #[error("resource ceiling exceeded: {0}")]
    Resource(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("certificate replay failed: {0}")]
    ReplayFailed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, UnitalError>;

use thiserror::Error;

/// Errors raised while building or combining finite algebras.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("algebra must have at least one element")]
    EmptyAlgebra,
    #[error("operation `{0}` is listed more than once")]
    DuplicateOp(String),
    #[error("operation `{0}` must have arity at least 1")]
    NullaryOp(String),
    #[error("operation `{op}` has {found} table entries, expected {expected}")]
    TableArity { op: String, expected: usize, found: usize },
    #[error("operation `{op}` has value {value} at position {position}, outside 0..{size}")]
    ValueRange {
        op: String,
        position: usize,
        value: usize,
        size: usize,
    },
    #[error("algebra is not pointed: `{op}` sends the all-zero tuple to {value}")]
    NotPointed { op: String, value: usize },
    #[error("element names: {0}")]
    BadNames(String),
    #[error("signatures do not match")]
    SignatureMismatch,
    #[error("algebras do not match: {0}")]
    AlgebraMismatch(String),
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("not a subuniverse: {0}")]
    NotASubuniverse(String),
    #[error("not a congruence: {0}")]
    NotACongruence(String),
    #[error("relation is not closed under the operations: {0}")]
    NotClosed(String),
    #[error("not a clot: {0}")]
    NotAClot(String),
    #[error("not surjective: {0}")]
    NotSurjective(String),
    #[error("relation is not reflexive: {0}")]
    NotReflexive(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("step bound exhausted: {0}")]
    StepBound(String),
    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),
    #[error("invalid variety: {0}")]
    InvalidVariety(String),
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = 2 is not supported; an odd prime is required")]
    EvenPrime,
    #[error("{value} is not a square modulo {p}")]
    NotASquare { value: u32, p: u32 },
    #[error("ratio {r} is not a nonzero square modulo {p}")]
    NotASquareRatio { r: u32, p: u32 },
    #[error("ratio must be nonzero")]
    ZeroRatio,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{what}: size {size} exceeds the limit {limit}")]
    TooLarge { what: &'static str, size: u128, limit: u128 },
    #[error("closed form requires even dimension, got d = {0}")]
    OddDimension(usize),
    #[error("distance set has no nonzero element")]
    NoNonzeroDistance,
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("norm mismatch: |u| = {lhs} but r|v| = {rhs}")]
    NormMismatch { lhs: u32, rhs: u32 },
    #[error("requires p = 3 (mod 4), got p = {0}")]
    WrongResidueClass(u32),
    #[error("matrix is not orthogonal")]
    NotOrthogonal,
    #[error("duplicate point {0}")]
    DuplicatePoint(String),
    #[error("point set must be nonempty")]
    EmptySet,
    #[error("requested {size} points but the space only has {space}")]
    SizeExceedsSpace { size: u128, space: u128 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("methods disagree for {name}: {detail}")]
    MethodMismatch { name: String, detail: String },
}

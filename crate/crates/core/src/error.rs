use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(u32),
    #[error("{0} is not a prime power >= 2")]
    NotPrimePower(u64),
    #[error("enumeration of {what} needs {required} items, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        budget: u64,
    },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("operands belong to different fields")]
    MixedField,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("element code {code} out of range for field of order {q}")]
    ElementOutOfRange { code: u64, q: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix index {index} out of range (space has {size} matrices)")]
    IndexOutOfRange { index: u64, size: u64 },
    #[error("common-neighbour count by rank class needs two distinct vertices")]
    IdenticalVertices,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("Hadamard order 2^{0} exceeds the limit of 1024")]
    TooLarge(u32),

    #[error("q = {0} is not congruent to 3 mod 4")]
    BadResidueClass(u64),

    #[error("no real Hadamard construction available for order {0}")]
    Unavailable(usize),

    #[error("expected a matrix of order {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("matrix fails the Hadamard conditions")]
    NotHadamard,

    #[error("synthesis matrix is rank deficient")]
    NotAFrame,

    #[error("frame spans its space; no Naimark complement exists")]
    FullRank,

    #[error("|X|^2 is numerically singular (condition number {0:.3e})")]
    SingularX2(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dense projector is limited to N <= {limit}; frame has N = {n}")]
    TooLargeForDense { n: usize, limit: usize },

    #[error("frame is not an ETF")]
    NotEtf,

    #[error("frame is not a UNTF")]
    NotUntf,

    #[error("N = {n} >= r(r+1)/2 = {limit}: witness coefficient is undefined")]
    GerzonSaturated { n: usize, limit: usize },

    #[error("ETF of {n} vectors in dimension {r} exceeds the Gerzon limit {limit}")]
    GerzonViolated { n: usize, r: usize, limit: usize },

    #[error("witness construction requires a real frame")]
    ComplexFrame,

    #[error("row index {0} out of range")]
    IndexOutOfRange(usize),

    #[error("subset enumeration budget exceeded ({0} subsets)")]
    BudgetExceeded(u128),

    #[error("graph is not regular (vertices {0} and {1} have different degrees)")]
    NotRegular(usize, usize),

    #[error("graph is not strongly regular (witness pair {0}, {1})")]
    NotStronglyRegular(usize, usize),

    #[error("domain violation: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

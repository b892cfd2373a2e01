use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("form is not negative definite")]
    NotNegativeDefinite,
    #[error("lattice is not definite")]
    NotDefinite,
    #[error("matrix entry does not fit in a machine word")]
    EntryTooLarge,
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),
    #[error("functional x -> <x,v> mod {0} vanishes identically")]
    TrivialFunctional(u64),
    #[error("finite quadratic form is degenerate")]
    DegenerateForm,
    #[error("unsupported finite form shape: {0}")]
    UnsupportedShape(String),
    #[error("quadratic space has odd dimension {0}")]
    OddLength(usize),
    #[error("finite form too large for exhaustive search ({0} elements)")]
    TooLarge(u64),
    #[error("bad neighbour prime {0}: {1}")]
    BadPrime(u64, String),
    #[error("matrix is not an isometry of the lattice")]
    NotAnIsometry,
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("no seed lattice found: {0}")]
    SeedNotFound(String),
    #[error("seed lattice rejected: {0}")]
    SeedRejected(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache corrupt: {0}")]
    CacheCorrupt(String),
    #[error("refused: {0}")]
    Infeasible(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

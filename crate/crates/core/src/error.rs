use thiserror::Error;

/// Errors produced by the exact-computation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("galois exponent {0} is not coprime to conductor {1}")]
    NotCoprime(i64, u64),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),

    #[error("element {0} is not central")]
    NotCentral(usize),

    #[error("insertion is not central in the algebra")]
    NonCentralInsertion,

    #[error("elements belong to different algebras")]
    MismatchedAlgebras,

    #[error("unstable moduli specification: genus {genus}, {points} marked points")]
    Unstable { genus: usize, points: usize },

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal defect: {0}")]
    Defect(String),
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of order q^{degree} - 1 = {order} exceeds budget {budget}")]
    FieldTooLarge { degree: u64, order: String, budget: u64 },
    #[error("degree {degree} outside 1..={max}")]
    DegreeOutOfRange { degree: u64, max: u64 },
    #[error("zero has no discrete logarithm")]
    ZeroInput,
    #[error("element does not lie in the requested subfield")]
    NotInSubfield,
    #[error("polynomial is not irreducible (or equals z)")]
    NotIrreducible,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("enumeration of {0} candidates exceeds budget")]
    EnumerationTooLarge(String),
    #[error("index norm {found} does not match n = {expected}")]
    NormMismatch { expected: u64, found: u64 },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("group of order {0} exceeds brute-force budget")]
    GroupTooLarge(String),
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("non-integral result: {0}")]
    InexactResult(String),
    #[error("orthogonality failure between {0} and {1}")]
    OrthogonalityFailure(String, String),
    #[error("divisibility violated: {0}")]
    DivisibilityViolation(String),
    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("argument out of range: {0}")]
    RangeError(String),
    #[error("not regular semisimple")]
    NotRegularSemisimple,
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cyclotomic modulus {0} too large for exact reduction")]
    ModulusTooLarge(u64),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for refusals caused by configured size budgets.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::FieldTooLarge { .. }
                | Error::EnumerationTooLarge(_)
                | Error::GroupTooLarge(_)
                | Error::TooLarge(_)
                | Error::ModulusTooLarge(_)
        )
    }
}

use thiserror::Error;

use crate::report::Report;

/// Errors raised by constructions and decision procedures.
///
/// Failures of a mathematical identity carry the full [`Report`] so callers
/// can inspect the witness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported prime {0}; supported primes are 2, 3, 5, 7")]
    UnsupportedPrime(u32),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("characteristic mismatch: expected {expected}, found {found}")]
    CharacteristicMismatch { expected: u8, found: u8 },

    #[error("value {0} does not lie in the base field")]
    NotInBaseField(String),

    #[error("algebra is not associative: {0}")]
    NotAssociative(String),

    #[error("algebra table is invalid: {0}")]
    InvalidAlgebra(String),

    #[error("module is not free over the coefficient algebra: {0}")]
    NotFree(String),

    #[error("p-map criterion fails at basis vector {index} ({name}): ad(u)^p - ad(u^[p]) = {difference}")]
    PMapCriterion { index: usize, name: String, difference: String },

    #[error("map is not a restricted Lie homomorphism at basis vector {index}: {detail}")]
    NotRestrictedHom { index: usize, detail: String },

    #[error("image of the p-semilinear map is not invariant: {0}")]
    NotInvariant(String),

    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),

    #[error("word degree {degree} exceeds the degree bound {bound}")]
    DegreeBoundExceeded { degree: usize, bound: usize },

    #[error("elements live in different enveloping algebras (restricted vs unrestricted)")]
    ModeMismatch,

    #[error("rewriting did not terminate within {0} steps")]
    RewriteLimit(usize),

    #[error("decision procedure requires the base field F_p, found {0}")]
    RequiresPrimeField(String),

    #[error("instance too large for exhaustive enumeration: {0}")]
    SizeBoundExceeded(String),

    #[error("extensions are over different data: {0}")]
    MismatchedExtensions(String),

    #[error("{0} is not constant for the derivation (∂ of it is {1})")]
    NotConstant(String, String),

    #[error("hypothesis failed: {hypothesis}")]
    Hypothesis { hypothesis: String, report: Box<Report> },

    #[error("axiom check failed: {}", .0.first_failure().unwrap_or_default())]
    Axiom(Box<Report>),

    #[error("internal verification failed: {0}")]
    Verification(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

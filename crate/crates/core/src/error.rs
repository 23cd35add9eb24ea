use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid discretization: {0}")]
    InvalidDiscretization(&'static str),
    #[error("operands live on different measure spaces")]
    SpaceMismatch,
    #[error("operation needs {expected} geometry")]
    GeometryMismatch { expected: &'static str },
    #[error("expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("atom index {index} out of range for {len} atoms")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("exponent mismatch: {left} vs {right}")]
    ExponentMismatch { left: f64, right: f64 },
    #[error("invalid exponent {0}: need 1 <= p < inf or the sup-norm marker")]
    InvalidExponent(f64),
    #[error("operation requires a finite exponent")]
    UnsupportedExponent,
    #[error("non-finite value at atom {0}")]
    NonFinite(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("invalid interval: alpha {alpha} > beta {beta}")]
    InvalidInterval { alpha: f64, beta: f64 },
    #[error("multiplier is not constant on the set (variation {variation:e})")]
    NotAFlat { variation: f64 },
    #[error("multiplier is constant: only the trivial band exists")]
    SingleBandOnly,
    #[error("precondition failed: {0}")]
    PreconditionError(&'static str),
    #[error("no admissible split at step {step}: {reason}")]
    FlatAtScale { step: usize, reason: &'static str },
    #[error("A x = 0 for the supplied x")]
    NoNonzeroImage,
    #[error("operator does not leave the level band at {alpha} invariant (violation {violation:e})")]
    NotLevelInvariant { alpha: f64, violation: f64 },
    #[error("|A a - u| = {residual:e} exceeds the invariance cap at step {step}")]
    InvarianceViolation { step: usize, residual: f64 },
    #[error("selected half of a vanishes at step {step}")]
    StarvedSide { step: usize },
    #[error("no convergent subsequence found (nearest pair distances {nearest:?})")]
    NoClusterPoint { nearest: Vec<f64> },
    #[error("the sequence does not have pairwise disjoint images")]
    NotDisjointImages,
    #[error("operator is not dominated by the compact-role operator")]
    NotDominated,
    #[error("trace has no steps")]
    EmptyTrace,
}

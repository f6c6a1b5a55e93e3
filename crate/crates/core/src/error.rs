use alloc::boxed::Box;

use thiserror::Error;

use crate::sequence::CompositeSequence;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("pulse area must be positive, got {0}")]
    NonPositiveArea(f64),
    #[error("error value must satisfy eps > -1, got {0}")]
    ErrorOutOfDomain(f64),
    #[error("composite sequence must contain at least one pulse")]
    EmptySequence,
    #[error("sequence violates the {family} layout: {reason}")]
    FamilyMismatch {
        family: &'static str,
        reason: &'static str,
    },
    #[error("series truncation order {0} exceeds the supported maximum of 64")]
    TruncationTooHigh(usize),
    #[error("expected {expected} parameters, got {actual}")]
    ParameterLength { expected: usize, actual: usize },
    #[error("invalid design problem: {0}")]
    InvalidProblem(&'static str),
    #[error("argument out of range: {0}")]
    OutOfRange(&'static str),
    #[error("Frobenius infidelity at eps = 0 is {0:e}, above the threshold: no range")]
    NoRange(f64),
    #[error("polish did not converge: residual {residual:e} after {iterations} iterations")]
    PolishDiverged {
        residual: f64,
        iterations: usize,
        /// Largest parameter change of the last iterate relative to the input.
        max_shift: f64,
        last: Box<CompositeSequence>,
    },
}

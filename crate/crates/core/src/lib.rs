//! Composite-pulse rotation gates for a resonantly driven qubit.
//!
//! The crate models a pulse train `(A₁)_{φ₁} (A₂)_{φ₂} …` whose nominal areas all
//! carry the same relative error `ε` (`A → A(1+ε)`), and provides:
//!
//! * exact SU(2) propagators at a fixed `ε` ([`su2`], [`sequence`]),
//! * truncated power series in `ε` and the compensation order of a sequence ([`series`]),
//! * Frobenius and trace fidelities, profiles and high-fidelity ranges ([`fidelity`]),
//! * solvers for the derivative-vanishing conditions ([`solver`]).
//!
//! Angles and areas are radians throughout. Conversion to units of π happens at the
//! IO boundary, which lives in the companion `cpulse` crate.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
// `!(x > 0.0)` is used deliberately so NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod linalg;
mod math;

pub mod fidelity;
pub mod sequence;
pub mod series;
pub mod solver;
pub mod su2;

pub use error::{Error, Result};
pub use fidelity::{FidelityProfile, HighFidelityRange};
pub use sequence::{CompositeSequence, Family, Pulse};
pub use series::{EpsSeries, OrderReport, SlopeEstimate, Su2Series};
pub use solver::{DesignProblem, Solution};
pub use su2::Su2Matrix;

/// Complex scalar used for Cayley-Klein parameters and series coefficients.
pub type Complex = num_complex::Complex<f64>;

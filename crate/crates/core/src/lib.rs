//! Complex conditional probabilities (projector weak values), Kirkwood-Dirac
//! distributions and the law of quantum ergodicity on finite grids, with a
//! Monte Carlo weak-measurement simulator and a configuration-driven harness.

// `!(a < b)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ccp;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod hilbert;
pub mod scalar;
pub mod weak;

pub use error::{LabError, Result};
pub use scalar::Scalar;

/// Double-precision instantiations.
pub type StateVectorF64 = hilbert::StateVector<f64>;
pub type HilbertSpecF64 = hilbert::HilbertSpec<f64>;
pub type CCPValueF64 = ccp::CCPValue<f64>;
/// Single-precision instantiations.
pub type StateVectorF32 = hilbert::StateVector<f32>;
pub type HilbertSpecF32 = hilbert::HilbertSpec<f32>;
pub type CCPValueF32 = ccp::CCPValue<f32>;

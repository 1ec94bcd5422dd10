//! Finite-dimensional Hilbert space primitives on a periodic 1-D grid.

mod basis;
mod eigen;
pub mod fourier;
mod matrix;
mod operator;
mod space;
mod state;

pub use basis::{make_momentum_basis, make_position_basis, BasisKind, BasisSet};
pub use eigen::{eigensystem, Eigensystem};
pub use matrix::ComplexMatrix;
pub use operator::{discretize_hamiltonian, OperatorMatrix, HERMITIAN_TOLERANCE};
pub use space::HilbertSpec;
pub(crate) use state::dot as dot_amplitudes;
pub use state::{inner, StateVector};

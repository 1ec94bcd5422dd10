//! Time evolution, propagator weak values, classical microcanonical densities
//! and the semiclassical action-gradient diagnostic.

mod classical;
mod evolution;
mod gradient;
mod propagator;
pub mod quadrature;

pub use classical::{
    classical_density, classical_ergodicity_report, classical_momentum_branch, turning_points, ClassicalDensity,
};
pub use evolution::{evolve, EvolutionMethod, EvolutionSpec, Propagator};
pub use gradient::{
    coarse_grain_decay, free_gradient_check, gradient_check, momentum_branches, unwrap_phase, CoarseGrainReport,
    GradientReport, GradientRow, MASK_FRACTION,
};
pub use propagator::{
    band_limited_position_momenta, free_ccp_analytic, free_ccp_numeric, midpoint_ccp_analytic, midpoint_ccp_numeric,
    BandLimit, FreeCcpNumeric, MidpointCcpNumeric,
};

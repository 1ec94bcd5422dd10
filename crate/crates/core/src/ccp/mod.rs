//! Complex conditional probabilities and the relations they obey.

mod coarse;
mod ergodicity;
mod kd;
mod reconstruct;
mod value;

pub use coarse::{block_mass, coarse_grain, coarse_grain_ccp};
pub use ergodicity::{ergodicity_check, ergodicity_check_with_eps, ergodicity_from_probabilities, ErgodicityReport};
pub use kd::{kd_distribution, KDDistribution};
pub use reconstruct::{
    action_phase_decompose, chain_rule_compose, conditional_profile, deviation_up_to_phase, optimal_global_phase,
    reconstruct_wavefunction, ActionPhaseDecomposition, Reconstruction,
};
pub use value::{ccp, ccp_with_eps, principal_arg, CCPValue, Context, DEFAULT_EPS_OVERLAP};

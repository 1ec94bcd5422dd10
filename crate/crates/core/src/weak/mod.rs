//! Monte Carlo weak measurements with post-selection on a Gaussian pointer.

mod estimate;
mod sim;

pub use estimate::{
    analytic_weak_value, bias_scan, estimate_weak_value, projector_config, BiasRow, BiasScan, WeakValueEstimate,
    MIN_ACCEPTED,
};
pub use sim::{simulate, trial_rng, ConfigEcho, MeasurementRecord, WeakSimConfig};

//! Configuration-driven scenario runner behind the `ccplab` binary.
//!
//! A TOML document selects a scenario, the grid and the scenario parameters.
//! Every run produces a [`ResultEnvelope`] that can be written as CSV (the
//! table only) or JSON (the whole envelope).

mod config;
mod error;
mod output;
mod scenarios;

pub use config::{
    parse_config, ActionPhaseParams, BiasScanParams, CcpParams, ChainRuleParams, ClassicalParams, CoarseGrainParams,
    Format, FreePropagatorParams, GradientParams, KdParams, MidpointParams, Overrides, PotentialSpec,
    ReconstructParams, Scenario, ScenarioConfig, ScenarioParams, SpaceConfig, StateSpec, WeakParams,
};
pub use error::{Diagnostic, HarnessError};
pub use output::{emit, render, resolve_output, write_atomic, ResultEnvelope, Table, OUT_DIR_ENV};
pub use scenarios::{build_state, eigenstate, run_scenario};

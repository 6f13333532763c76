//! Monte Carlo experiments: configuration, metrics, sweeps and output.

pub mod config;
pub mod metrics;
pub mod output;
pub mod sweep;

pub use config::{ExperimentConfig, GridRegion, Method};
pub use metrics::{
    pair_estimates, resolution_thresholds, resolution_trial, rmse, wrap_azimuth_deg, Pairing,
};
pub use output::{transform_info, write_resolve_csv, write_sweep_csv, EstimateJson, TransformInfo};
pub use sweep::{
    run_sweep, run_trial, trial_data, trial_seed, SweepResult, SweepRow, TrialContext,
};

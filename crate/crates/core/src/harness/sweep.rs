//! Monte Carlo sweeps over SNR with paired trials.

use std::sync::Arc;
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;

use crate::array_model::{
    synthesize_snapshots, Direction, SnapshotMatrix, SourceScenario, UcaGeometry,
};
use crate::baselines::rb_music_with;
use crate::beamspace::{build_fr, BeamspaceTransform};
use crate::error::{DoaError, Result};
use crate::harness::config::{ExperimentConfig, Method};
use crate::harness::metrics::{resolution_trial, rmse};
use crate::sparse::{c_l1_svd, rb_l1_svd_with, DirectionGrid, DoaEstimate, EstimatorConfig};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one trial, a fixed function of the base seed and its position.
pub fn trial_seed(base_seed: u64, snr_index: usize, run_index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ snr_index as u64) ^ run_index as u64)
}

/// Shared, read-only inputs of every trial in a sweep.
#[derive(Debug, Clone)]
pub struct TrialContext {
    pub geometry: UcaGeometry,
    pub transform: Arc<BeamspaceTransform>,
    pub grid: Arc<DirectionGrid>,
    pub estimator: EstimatorConfig,
    pub k: usize,
}

impl TrialContext {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            geometry: config.geometry,
            transform: Arc::new(build_fr(&config.geometry)?),
            grid: Arc::new(config.coarse_grid()?),
            estimator: config.estimator(),
            k: config.n_sources(),
        })
    }

    /// Run one estimator on one data set.
    pub fn run(&self, method: Method, x: &SnapshotMatrix) -> Result<DoaEstimate> {
        match method {
            Method::RbL1svd => rb_l1_svd_with(
                x,
                self.transform.clone(),
                self.k,
                self.grid.clone(),
                &self.estimator,
            ),
            Method::CL1svd => c_l1_svd(
                x,
                &self.geometry,
                self.k,
                self.grid.clone(),
                &self.estimator,
            ),
            Method::RbMusic => rb_music_with(
                x,
                self.transform.clone(),
                self.k,
                self.grid.clone(),
                self.estimator.refinement.as_ref(),
            ),
        }
    }
}

/// Result of one method in one trial. `directions` is `None` when the
/// estimator failed or its solver did not converge.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub method: Method,
    pub directions: Option<Vec<Direction>>,
    pub wall_time: Duration,
    pub error: Option<String>,
}

/// Snapshots of trial (`snr_index`, `run_index`).
pub fn trial_data(
    config: &ExperimentConfig,
    snr_index: usize,
    run_index: usize,
) -> Result<SnapshotMatrix> {
    let seed = trial_seed(config.base_seed, snr_index, run_index);
    let scenario = SourceScenario::new(
        config.sources.clone(),
        config.snr_sweep_db[snr_index],
        config.n_snapshots,
        seed,
    )?
    .with_source_kind(config.source_kind);
    let scenario = if config.noiseless {
        scenario.noiseless()
    } else {
        scenario
    };
    Ok(synthesize_snapshots(&config.geometry, &scenario))
}

/// Every configured method on the same snapshot matrix.
pub fn run_trial(
    config: &ExperimentConfig,
    context: &TrialContext,
    snr_index: usize,
    run_index: usize,
) -> Result<Vec<TrialOutcome>> {
    let x = trial_data(config, snr_index, run_index)?;
    Ok(config
        .methods
        .iter()
        .map(|&method| match context.run(method, &x) {
            Ok(est) if est.converged() => TrialOutcome {
                method,
                directions: Some(est.directions),
                wall_time: est.wall_time,
                error: None,
            },
            Ok(est) => TrialOutcome {
                method,
                directions: None,
                wall_time: est.wall_time,
                error: Some("solver did not converge".into()),
            },
            Err(e) => TrialOutcome {
                method,
                directions: None,
                wall_time: Duration::ZERO,
                error: Some(e.to_string()),
            },
        })
        .collect())
}

/// Aggregate for one (method, SNR) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub method: Method,
    pub snr_db: f64,
    /// NaN when no run succeeded.
    pub rmse_az_deg: f64,
    pub rmse_el_deg: f64,
    /// Present for two-source scenarios.
    pub resolution_probability: Option<f64>,
    pub mean_wall_time_ms: f64,
    pub n_runs_used: usize,
    pub n_runs_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, method: Method, snr_db: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.snr_db == snr_db)
    }

    /// Rows of one method in sweep order.
    pub fn series(&self, method: Method) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.method == method).collect()
    }

    pub fn total_runs_used(&self) -> usize {
        self.rows.iter().map(|r| r.n_runs_used).sum()
    }
}

/// Run all trials (in parallel) and aggregate per method and SNR. Output does
/// not depend on the number of threads: each trial has a pre-assigned seed
/// and aggregation happens in a fixed order.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    let context = TrialContext::new(config)?;
    let jobs: Vec<(usize, usize)> = (0..config.snr_sweep_db.len())
        .flat_map(|s| (0..config.n_runs).map(move |r| (s, r)))
        .collect();
    let outcomes: Vec<Vec<TrialOutcome>> = jobs
        .par_iter()
        .map(|&(s, r)| run_trial(config, &context, s, r))
        .collect::<Result<_>>()?;

    let two_sources = config.n_sources() == 2;
    let mut rows = Vec::new();
    for (s, &snr_db) in config.snr_sweep_db.iter().enumerate() {
        let trials = &outcomes[s * config.n_runs..(s + 1) * config.n_runs];
        for (mi, &method) in config.methods.iter().enumerate() {
            let ok: Vec<&TrialOutcome> = trials
                .iter()
                .map(|t| &t[mi])
                .filter(|o| o.directions.is_some())
                .collect();
            let runs: Vec<Vec<Direction>> = ok
                .iter()
                .map(|o| o.directions.clone().expect("filtered"))
                .collect();
            let (rmse_az_deg, rmse_el_deg) = match rmse(&runs, &config.sources) {
                Ok(v) => v,
                Err(DoaError::NoSuccessfulRuns) => (f64::NAN, f64::NAN),
                Err(e) => return Err(e),
            };
            let resolution_probability = if two_sources && !runs.is_empty() {
                let mut hits = 0usize;
                for est in &runs {
                    hits += usize::from(resolution_trial(est, &config.sources)?);
                }
                Some(hits as f64 / runs.len() as f64)
            } else {
                None
            };
            let mean_wall_time_ms = if config.record_wall_time && !ok.is_empty() {
                ok.iter()
                    .map(|o| o.wall_time.as_secs_f64() * 1e3)
                    .sum::<f64>()
                    / ok.len() as f64
            } else {
                0.0
            };
            rows.push(SweepRow {
                method,
                snr_db,
                rmse_az_deg,
                rmse_el_deg,
                resolution_probability,
                mean_wall_time_ms,
                n_runs_used: ok.len(),
                n_runs_failed: config.n_runs - ok.len(),
            });
        }
    }
    Ok(SweepResult { rows })
}

//! CSV tables, estimate JSON and transform diagnostics.

use std::io::Write;

use serde::Serialize;

use crate::array_model::{Direction, UcaGeometry};
use crate::beamspace::build_fr;
use crate::error::Result;
use crate::harness::sweep::SweepResult;
use crate::sparse::{DirectionGrid, DoaEstimate, PipelineTag};

pub const SWEEP_HEADER: [&str; 6] = [
    "method",
    "snr_db",
    "rmse_az_deg",
    "rmse_el_deg",
    "mean_wall_time_ms",
    "n_runs_used",
];

pub const RESOLVE_HEADER: [&str; 4] = ["method", "snr_db", "resolution_probability", "n_runs_used"];

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

/// RMSE table, one row per (method, SNR).
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in &result.rows {
        w.write_record([
            r.method.name().to_string(),
            fixed(r.snr_db),
            fixed(r.rmse_az_deg),
            fixed(r.rmse_el_deg),
            fixed(r.mean_wall_time_ms),
            r.n_runs_used.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Resolution probability table; rows without a probability are skipped.
pub fn write_resolve_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESOLVE_HEADER)?;
    for r in &result.rows {
        let p = match r.resolution_probability {
            Some(p) => p,
            None if r.n_runs_used == 0 => f64::NAN,
            None => continue,
        };
        w.write_record([
            r.method.name().to_string(),
            fixed(r.snr_db),
            fixed(p),
            r.n_runs_used.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionJson {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
}

impl From<&Direction> for DirectionJson {
    fn from(d: &Direction) -> Self {
        Self {
            azimuth_deg: d.azimuth_deg(),
            elevation_deg: d.elevation_deg(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumPoint {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveJson {
    pub beta: f64,
    pub residual_norm: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub duality_gap_estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateJson {
    pub method: String,
    pub directions: Vec<DirectionJson>,
    pub refined: bool,
    pub converged: bool,
    pub peaks_filled: bool,
    pub wall_time_ms: f64,
    pub solves: Vec<SolveJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<SpectrumPoint>>,
}

impl EstimateJson {
    pub fn new(est: &DoaEstimate, with_spectrum: bool) -> Self {
        let method = match est.pipeline_tag {
            PipelineTag::RealBeamspace => "rb-l1svd",
            PipelineTag::ComplexElementSpace => "c-l1svd",
            PipelineTag::RealBeamspaceMusic => "rb-music",
        };
        let spectrum = with_spectrum.then(|| {
            est.spectrum
                .grid
                .points()
                .iter()
                .zip(&est.spectrum.values)
                .map(|(d, &value)| SpectrumPoint {
                    azimuth_deg: d.azimuth_deg(),
                    elevation_deg: d.elevation_deg(),
                    value,
                })
                .collect()
        });
        Self {
            method: method.into(),
            directions: est.directions.iter().map(DirectionJson::from).collect(),
            refined: est.refined,
            converged: est.converged(),
            peaks_filled: est.peaks_filled,
            wall_time_ms: est.wall_time.as_secs_f64() * 1e3,
            solves: est
                .solves
                .iter()
                .map(|s| SolveJson {
                    beta: s.beta,
                    residual_norm: s.residual_norm,
                    objective: s.objective,
                    iterations: s.iterations,
                    converged: s.converged,
                    duality_gap_estimate: s.duality_gap_estimate,
                })
                .collect(),
            spectrum,
        }
    }
}

/// Sizes and numerical diagnostics of the beamspace transform of a geometry.
#[derive(Debug, Clone, Serialize)]
pub struct TransformInfo {
    pub n_sensors: usize,
    pub radius_over_wavelength: f64,
    /// Highest phase mode M.
    pub mode_order: usize,
    /// Beamspace dimension 2M + 1.
    pub beam_count: usize,
    /// Largest entry of |F_r^H F_r - I|.
    pub orthonormality_error: f64,
    /// Largest relative imaginary residual ||Im b|| / ||Re b|| over the
    /// sampled directions and where it occurs.
    pub max_imag_residual: f64,
    pub worst_direction: DirectionJson,
    pub sample_step_deg: f64,
    pub samples: usize,
}

pub fn transform_info(geom: &UcaGeometry, sample_step_deg: f64) -> Result<TransformInfo> {
    let t = build_fr(geom)?;
    let m = t.beam_count();
    let gram = t.matrix() * t.matrix().adjoint();
    let mut orthonormality_error: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let target = if i == j { 1.0 } else { 0.0 };
            orthonormality_error = orthonormality_error.max((gram[(i, j)] - target).norm());
        }
    }
    let grid = DirectionGrid::full(sample_step_deg)?;
    let mut worst = (0.0, grid.points()[0]);
    for d in grid.points() {
        let (_, r) = t.beamspace_manifold_with_residual(d);
        if r > worst.0 {
            worst = (r, *d);
        }
    }
    Ok(TransformInfo {
        n_sensors: geom.n_sensors(),
        radius_over_wavelength: geom.radius_over_wavelength(),
        mode_order: t.mode_order(),
        beam_count: m,
        orthonormality_error,
        max_imag_residual: worst.0,
        worst_direction: DirectionJson::from(&worst.1),
        sample_step_deg,
        samples: grid.len(),
    })
}

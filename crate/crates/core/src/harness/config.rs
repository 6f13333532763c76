//! Experiment configuration, read from JSON.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::array_model::{Direction, SourceKind, UcaGeometry};
use crate::beamspace::build_fr;
use crate::error::{DoaError, Result};
use crate::sparse::{DirectionGrid, EstimatorConfig, Refinement, SolverConfig};

/// Estimators the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    RbL1svd,
    CL1svd,
    RbMusic,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::RbL1svd, Method::CL1svd, Method::RbMusic];

    pub fn name(self) -> &'static str {
        match self {
            Method::RbL1svd => "rb-l1svd",
            Method::CL1svd => "c-l1svd",
            Method::RbMusic => "rb-music",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = DoaError;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                DoaError::Config(format!(
                    "unknown method '{s}' (expected rb-l1svd, c-l1svd or rb-music)"
                ))
            })
    }
}

/// Rectangular search region in degrees, bounds inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRegion {
    pub az_start: f64,
    pub az_end: f64,
    pub el_start: f64,
    pub el_end: f64,
}

/// Margin of the automatic region around the true sources.
pub const AUTO_REGION_MARGIN_DEG: f64 = 20.0;

impl GridRegion {
    /// Bounding box of `sources` widened by `margin`, snapped outward to the
    /// lattice of `step` and clipped to the domain. Falls back to the whole
    /// azimuth circle when the box would cross the 0/360 seam.
    pub fn around(sources: &[Direction], margin: f64, step: f64) -> Result<Self> {
        if sources.is_empty() {
            return Err(DoaError::Config(
                "no sources to build a region around".into(),
            ));
        }
        let snap_down = |v: f64| (v / step + 1e-9).floor() * step;
        let snap_up = |v: f64| (v / step - 1e-9).ceil() * step;
        let last_az = (((360.0 / step) - 1e-9).ceil() - 1.0) * step;
        let last_el = (((90.0 / step) - 1e-9).ceil() - 1.0) * step;

        let az_lo = sources
            .iter()
            .map(|d| d.azimuth_deg())
            .fold(f64::INFINITY, f64::min);
        let az_hi = sources
            .iter()
            .map(|d| d.azimuth_deg())
            .fold(f64::NEG_INFINITY, f64::max);
        let el_lo = sources
            .iter()
            .map(|d| d.elevation_deg())
            .fold(f64::INFINITY, f64::min);
        let el_hi = sources
            .iter()
            .map(|d| d.elevation_deg())
            .fold(f64::NEG_INFINITY, f64::max);

        let (az_start, az_end) = if az_lo - margin < 0.0 || az_hi + margin > last_az {
            (0.0, last_az)
        } else {
            (snap_down(az_lo - margin), snap_up(az_hi + margin))
        };
        Ok(Self {
            az_start,
            az_end,
            el_start: snap_down(el_lo - margin).max(0.0),
            el_end: snap_up(el_hi + margin).min(last_el),
        })
    }
}

/// Everything a Monte Carlo sweep needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: UcaGeometry,
    pub sources: Vec<Direction>,
    pub source_kind: SourceKind,
    pub snr_sweep_db: Vec<f64>,
    /// Generate noise-free data; the SNR values then only label the rows.
    pub noiseless: bool,
    pub n_snapshots: usize,
    pub n_runs: usize,
    pub base_seed: u64,
    pub methods: Vec<Method>,
    pub coarse_step_deg: f64,
    /// Refinement step; equal to `coarse_step_deg` disables refinement.
    pub fine_step_deg: f64,
    pub refinement_window_cells: usize,
    /// Coarse search region; `None` selects a box around the sources.
    pub grid_region: Option<GridRegion>,
    /// Search the whole domain instead of a region.
    pub full_grid: bool,
    pub solver: SolverConfig,
    pub confidence: f64,
    /// Widen the RB-l1SVD residual budget by the beamspace model error.
    pub model_error_allowance: bool,
    /// When false, wall times are reported as zero so that output only
    /// depends on the configuration.
    pub record_wall_time: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: UcaGeometry::new(13, 1.0).expect("valid default geometry"),
            sources: vec![
                Direction::new(110.1, 35.3).expect("valid"),
                Direction::new(120.8, 45.0).expect("valid"),
                Direction::new(170.5, 85.0).expect("valid"),
            ],
            source_kind: SourceKind::ComplexGaussian,
            snr_sweep_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            noiseless: false,
            n_snapshots: 100,
            n_runs: 50,
            base_seed: 0,
            methods: Method::ALL.to_vec(),
            coarse_step_deg: 1.0,
            fine_step_deg: 0.1,
            refinement_window_cells: 2,
            grid_region: None,
            full_grid: false,
            solver: SolverConfig::default(),
            confidence: 0.99,
            model_error_allowance: true,
            record_wall_time: true,
        }
    }
}

impl ExperimentConfig {
    /// Two closely spaced sources used for resolution experiments.
    pub fn close_pair() -> Self {
        Self {
            sources: vec![
                Direction::new(200.3, 69.4).expect("valid"),
                Direction::new(205.7, 74.5).expect("valid"),
            ],
            ..Self::default()
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DoaError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn n_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(DoaError::Config(msg));
        if self.sources.is_empty() {
            return fail("sources must not be empty".into());
        }
        for (i, a) in self.sources.iter().enumerate() {
            if self.sources[i + 1..].contains(a) {
                return fail(format!(
                    "duplicate source ({}, {})",
                    a.azimuth_deg(),
                    a.elevation_deg()
                ));
            }
        }
        if self.snr_sweep_db.is_empty() {
            return fail("snr_sweep_db must not be empty".into());
        }
        if let Some(s) = self.snr_sweep_db.iter().find(|s| !s.is_finite()) {
            return fail(format!("snr_sweep_db entries must be finite, got {s}"));
        }
        if self.n_snapshots == 0 {
            return fail("n_snapshots must be at least 1".into());
        }
        if self.n_runs == 0 {
            return fail("n_runs must be at least 1".into());
        }
        if self.methods.is_empty() {
            return fail("methods must not be empty".into());
        }
        if !(self.coarse_step_deg > 0.0 && self.coarse_step_deg.is_finite()) {
            return fail(format!(
                "coarse_step_deg must be positive, got {}",
                self.coarse_step_deg
            ));
        }
        if !(self.fine_step_deg > 0.0 && self.fine_step_deg <= self.coarse_step_deg) {
            return fail(format!(
                "fine_step_deg must lie in (0, coarse_step_deg], got {}",
                self.fine_step_deg
            ));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return fail(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            ));
        }
        self.solver
            .validate()
            .map_err(|e| DoaError::Config(e.to_string()))?;
        let transform = build_fr(&self.geometry).map_err(|e| DoaError::Config(e.to_string()))?;
        let k = self.n_sources();
        if self.methods.contains(&Method::RbMusic) && k >= transform.beam_count() {
            return fail(format!(
                "rb-music needs fewer than {} sources, got {k}",
                transform.beam_count()
            ));
        }
        if k > self.geometry.n_sensors() {
            return fail(format!(
                "{k} sources exceed {} sensors",
                self.geometry.n_sensors()
            ));
        }
        self.coarse_grid()?;
        Ok(())
    }

    /// Search region actually used for the coarse grid.
    pub fn effective_region(&self) -> Result<GridRegion> {
        let step = self.coarse_step_deg;
        if self.full_grid {
            return GridRegion::around(&[Direction::new(0.0, 0.0)?], f64::INFINITY, step);
        }
        match self.grid_region {
            Some(r) => Ok(r),
            None => GridRegion::around(&self.sources, AUTO_REGION_MARGIN_DEG, step),
        }
    }

    pub fn coarse_grid(&self) -> Result<DirectionGrid> {
        if self.full_grid {
            return DirectionGrid::full(self.coarse_step_deg)
                .map_err(|e| DoaError::Config(e.to_string()));
        }
        let r = self.effective_region()?;
        DirectionGrid::rectangular(
            r.az_start,
            r.az_end,
            r.el_start,
            r.el_end,
            self.coarse_step_deg,
        )
        .map_err(|e| DoaError::Config(format!("grid_region: {e}")))
    }

    pub fn refinement(&self) -> Option<Refinement> {
        (self.fine_step_deg < self.coarse_step_deg).then_some(Refinement {
            fine_step_deg: self.fine_step_deg,
            window_cells: self.refinement_window_cells,
        })
    }

    pub fn estimator(&self) -> EstimatorConfig {
        EstimatorConfig {
            solver: self.solver,
            confidence: self.confidence,
            refinement: self.refinement(),
            model_error_allowance: self.model_error_allowance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_round_trips() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        let back = ExperimentConfig::from_json_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c =
            ExperimentConfig::from_json_str(r#"{"n_runs": 3, "methods": ["rb-music"]}"#).unwrap();
        assert_eq!(c.n_runs, 3);
        assert_eq!(c.methods, vec![Method::RbMusic]);
        assert_eq!(c.n_snapshots, 100);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            r#"{"n_runs": 0}"#,
            r#"{"snr_sweep_db": []}"#,
            r#"{"methods": []}"#,
            r#"{"methods": ["esprit"]}"#,
            r#"{"fine_step_deg": 2.0}"#,
            r#"{"confidence": 1.0}"#,
            r#"{"unknown_field": 1}"#,
            r#"{"geometry": {"n_sensors": 11, "radius_over_wavelength": 1.0}}"#,
            r#"{"sources": [{"azimuth_deg": 10.0, "elevation_deg": 95.0}]}"#,
            r#"{"grid_region": {"az_start": 50.0, "az_end": 40.0, "el_start": 0.0, "el_end": 10.0}}"#,
        ] {
            let err = ExperimentConfig::from_json_str(text).unwrap_err();
            assert!(matches!(err, DoaError::Config(_)), "{text}: {err:?}");
        }
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(
                serde_json::to_string(&m).unwrap(),
                format!("\"{}\"", m.name())
            );
        }
    }

    #[test]
    fn auto_region_around_default_scenario() {
        let r = ExperimentConfig::default().effective_region().unwrap();
        assert_eq!((r.az_start, r.az_end), (90.0, 191.0));
        assert_eq!((r.el_start, r.el_end), (15.0, 89.0));
    }

    #[test]
    fn auto_region_near_seam_takes_full_azimuth() {
        let s = [Direction::new(355.0, 20.0).unwrap()];
        let r = GridRegion::around(&s, 10.0, 1.0).unwrap();
        assert_eq!((r.az_start, r.az_end), (0.0, 359.0));
        assert_eq!((r.el_start, r.el_end), (10.0, 30.0));
    }

    #[test]
    fn full_grid_flag() {
        let c = ExperimentConfig {
            full_grid: true,
            ..ExperimentConfig::default()
        };
        assert_eq!(c.coarse_grid().unwrap().len(), 32400);
    }
}

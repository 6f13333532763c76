//! End-to-end sparse DOA pipelines.
//!
//! Element space (C-l1SVD): reduce X to its K-dimensional signal subspace,
//! then solve the complex row-sparse program against the UCA manifold.
//!
//! Real beamspace (RB-l1SVD): reduce X, map it to beamspace with `F_r^H`,
//! stack real and imaginary parts, reduce again with a real SVD and solve a
//! real program against `B = Re(F_r^H A)`. Everything after the stacking
//! step is `f64`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::{Duration, Instant};

use super::grid::DirectionGrid;
use super::solver::{solve_group_l1, RowSparseSolution, SolverConfig};
use super::spectrum::{
    extract_separated_peaks, extract_window_peaks, spectrum_from_solution, SpatialSpectrum,
};
use crate::array_model::{manifold_matrix_unchecked, Direction, SnapshotMatrix, UcaGeometry};
use crate::beamspace::{build_fr, BeamspaceTransform};
use crate::error::{DoaError, Result};
use crate::subspace::{
    noise_bound, real_subspace_reduce, signal_subspace_reduce, stack_real_imag, NoiseComponents,
};
use crate::{Scalar, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineTag {
    ComplexElementSpace,
    RealBeamspace,
    RealBeamspaceMusic,
}

/// Fine re-gridding around coarse estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub fine_step_deg: f64,
    /// Half-width of each window, in coarse grid cells.
    pub window_cells: usize,
}

impl Default for Refinement {
    fn default() -> Self {
        Self {
            fine_step_deg: 0.1,
            window_cells: 2,
        }
    }
}

/// Settings shared by the sparse pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Solver settings; `beta` is overwritten by the problem's budget.
    pub solver: SolverConfig,
    pub confidence: f64,
    pub refinement: Option<Refinement>,
    /// Widen the real beamspace budget by the model error of discarding
    /// `Im(F_r^H a)`; see [`BeamspaceTransform::reduction_mismatch`].
    pub model_error_allowance: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            confidence: 0.99,
            refinement: Some(Refinement::default()),
            model_error_allowance: true,
        }
    }
}

/// Solver diagnostics carried by an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveReport {
    pub beta: f64,
    pub residual_norm: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub duality_gap_estimate: f64,
}

impl SolveReport {
    fn from_solution<T: Scalar>(s: &RowSparseSolution<T>) -> Self {
        Self {
            beta: s.beta,
            residual_norm: s.residual_norm,
            objective: s.objective,
            iterations: s.iterations,
            converged: s.converged,
            duality_gap_estimate: s.duality_gap_estimate,
        }
    }
}

/// K direction estimates, strongest first.
#[derive(Debug, Clone)]
pub struct DoaEstimate {
    pub directions: Vec<Direction>,
    /// Spectrum the final directions were read from (the fine grid when refined).
    pub spectrum: SpatialSpectrum,
    pub refined: bool,
    pub pipeline_tag: PipelineTag,
    pub wall_time: Duration,
    pub peaks_filled: bool,
    /// Reports of every convex solve, coarse first. Empty for MUSIC.
    pub solves: Vec<SolveReport>,
}

impl DoaEstimate {
    pub fn converged(&self) -> bool {
        self.solves.iter().all(|s| s.converged)
    }
}

/// Smallest direction-cosine distance between two coarse peaks, as a
/// fraction of the Rayleigh radius of the array.
pub const PEAK_SEPARATION_RAYLEIGH: f64 = 0.125;

/// Minimum separation used when picking coarse peaks for `geom`.
pub fn peak_separation(geom: &UcaGeometry) -> f64 {
    PEAK_SEPARATION_RAYLEIGH * geom.rayleigh_radius()
}

/// A reduced observation, residual budget and dictionary generator.
pub trait RecoveryProblem {
    type Scalar: Scalar;
    fn geometry(&self) -> &UcaGeometry;
    fn observation(&self) -> &DMatrix<Self::Scalar>;
    fn beta(&self) -> f64;
    /// Residual budget used on `grid`; the noise bound unless the problem
    /// adds a model error term.
    fn budget(&self, grid: &DirectionGrid) -> f64 {
        let _ = grid;
        self.beta()
    }
    fn dictionary(&self, grid: &DirectionGrid) -> DMatrix<Self::Scalar>;
    fn tag(&self) -> PipelineTag;
}

/// Complex element-space program of C-l1SVD.
#[derive(Debug, Clone)]
pub struct ElementSpaceProblem {
    geometry: UcaGeometry,
    observation: DMatrix<C64>,
    beta: f64,
}

impl ElementSpaceProblem {
    pub fn prepare(
        x: &SnapshotMatrix,
        geom: &UcaGeometry,
        k: usize,
        confidence: f64,
    ) -> Result<Self> {
        check_sensors(x, geom)?;
        let reduced = signal_subspace_reduce(&x.entries, k)?;
        let beta = if x.noise_variance > 0.0 {
            noise_bound(
                x.noise_variance,
                geom.n_sensors() * k,
                confidence,
                NoiseComponents::ComplexEntry,
            )?
            .beta
        } else {
            0.0
        };
        Ok(Self {
            geometry: *geom,
            observation: reduced.matrix,
            beta,
        })
    }
}

impl RecoveryProblem for ElementSpaceProblem {
    type Scalar = C64;
    fn geometry(&self) -> &UcaGeometry {
        &self.geometry
    }
    fn observation(&self) -> &DMatrix<C64> {
        &self.observation
    }
    fn beta(&self) -> f64 {
        self.beta
    }
    fn dictionary(&self, grid: &DirectionGrid) -> DMatrix<C64> {
        manifold_matrix_unchecked(&self.geometry, grid.points())
    }
    fn tag(&self) -> PipelineTag {
        PipelineTag::ComplexElementSpace
    }
}

/// Real beamspace program of RB-l1SVD.
#[derive(Debug, Clone)]
pub struct BeamspaceProblem {
    transform: Arc<BeamspaceTransform>,
    observation: DMatrix<f64>,
    beta: f64,
    model_error_allowance: bool,
}

impl BeamspaceProblem {
    pub fn prepare(
        x: &SnapshotMatrix,
        transform: Arc<BeamspaceTransform>,
        k: usize,
        confidence: f64,
    ) -> Result<Self> {
        check_sensors(x, transform.geometry())?;
        let reduced = signal_subspace_reduce(&x.entries, k)?;
        let beamspace = transform.apply(&reduced.matrix)?;
        let stacked: DMatrix<f64> = stack_real_imag(&beamspace);
        let real = real_subspace_reduce(&stacked, k)?;
        let beta = if x.noise_variance > 0.0 {
            noise_bound(
                x.noise_variance,
                transform.beam_count() * k,
                confidence,
                NoiseComponents::RealPart,
            )?
            .beta
        } else {
            0.0
        };
        Ok(Self {
            transform,
            observation: real.matrix,
            beta,
            model_error_allowance: false,
        })
    }

    /// Add `mu ||Y||` in quadrature to the noise bound, with `mu` the
    /// largest one-source reduction mismatch over the grid.
    pub fn with_model_error_allowance(mut self, enabled: bool) -> Self {
        self.model_error_allowance = enabled;
        self
    }

    pub fn transform(&self) -> &BeamspaceTransform {
        &self.transform
    }
}

impl RecoveryProblem for BeamspaceProblem {
    type Scalar = f64;
    fn geometry(&self) -> &UcaGeometry {
        self.transform.geometry()
    }
    fn observation(&self) -> &DMatrix<f64> {
        &self.observation
    }
    fn beta(&self) -> f64 {
        self.beta
    }
    fn budget(&self, grid: &DirectionGrid) -> f64 {
        if !self.model_error_allowance {
            return self.beta;
        }
        let model = self.transform.reduction_mismatch(grid.points()) * self.observation.norm();
        self.beta.hypot(model)
    }
    fn dictionary(&self, grid: &DirectionGrid) -> DMatrix<f64> {
        self.transform.real_dictionary(grid.points())
    }
    fn tag(&self) -> PipelineTag {
        PipelineTag::RealBeamspace
    }
}

fn check_sensors(x: &SnapshotMatrix, geom: &UcaGeometry) -> Result<()> {
    if x.n_sensors() != geom.n_sensors() {
        return Err(DoaError::DimensionMismatch {
            expected: geom.n_sensors(),
            actual: x.n_sensors(),
        });
    }
    Ok(())
}

/// Solve the program on one grid with the budget `solver.beta` and return
/// the solution with its spectrum.
pub fn solve_on_grid<P: RecoveryProblem>(
    problem: &P,
    grid: Arc<DirectionGrid>,
    solver: &SolverConfig,
) -> Result<(RowSparseSolution<P::Scalar>, SpatialSpectrum)> {
    let dictionary = problem.dictionary(&grid);
    let solution = solve_group_l1(problem.observation(), &dictionary, solver)?;
    let spectrum = spectrum_from_solution(&solution, grid)?;
    Ok((solution, spectrum))
}

fn estimate_on_grid<P: RecoveryProblem>(
    problem: &P,
    k: usize,
    grid: Arc<DirectionGrid>,
    solver: &SolverConfig,
) -> Result<DoaEstimate> {
    let (solution, spectrum) = solve_on_grid(problem, grid, solver)?;
    let peaks = extract_separated_peaks(&spectrum, k, peak_separation(problem.geometry()))?;
    Ok(DoaEstimate {
        directions: peaks.directions,
        spectrum,
        refined: false,
        pipeline_tag: problem.tag(),
        wall_time: Duration::ZERO,
        peaks_filled: peaks.filled_with_non_maxima,
        solves: vec![SolveReport::from_solution(&solution)],
    })
}

/// Grid made of windows of +-`window_cells` coarse cells around each estimate.
pub fn refinement_grid(
    coarse: &[Direction],
    coarse_step_deg: f64,
    refinement: &Refinement,
) -> Result<DirectionGrid> {
    if !(refinement.fine_step_deg > 0.0 && refinement.fine_step_deg < coarse_step_deg) {
        return Err(DoaError::InvalidParameter(format!(
            "fine step {} must be positive and below the coarse step {coarse_step_deg}",
            refinement.fine_step_deg
        )));
    }
    let half_width = refinement.window_cells as f64 * coarse_step_deg;
    DirectionGrid::window_union(coarse, half_width, refinement.fine_step_deg)
}

/// Re-solve the same program (same `solver.beta`) with the coarse grid refined around
/// the coarse estimates, and take one peak per window. Coarse points outside
/// the windows stay in the dictionary so that the refined program is never
/// worse than the coarse one.
pub fn refine_estimate<P: RecoveryProblem>(
    problem: &P,
    coarse: &DoaEstimate,
    refinement: &Refinement,
    solver: &SolverConfig,
) -> Result<DoaEstimate> {
    let coarse_step = coarse.spectrum.grid.azimuth_step();
    // Validates the steps.
    refinement_grid(&coarse.directions, coarse_step, refinement)?;
    let half_width = refinement.window_cells as f64 * coarse_step;
    let grid = Arc::new(coarse.spectrum.grid.refine_around(
        &coarse.directions,
        half_width,
        refinement.fine_step_deg,
    )?);
    let (solution, spectrum) = solve_on_grid(problem, grid, solver)?;
    let peaks = extract_window_peaks(&spectrum, &coarse.directions, half_width)?;
    let mut solves = coarse.solves.clone();
    solves.push(SolveReport::from_solution(&solution));
    Ok(DoaEstimate {
        directions: peaks.directions,
        spectrum,
        refined: true,
        pipeline_tag: problem.tag(),
        wall_time: coarse.wall_time,
        peaks_filled: coarse.peaks_filled || peaks.filled_with_non_maxima,
        solves,
    })
}

/// Coarse estimate followed by the configured refinement.
pub fn estimate<P: RecoveryProblem>(
    problem: &P,
    k: usize,
    grid: Arc<DirectionGrid>,
    config: &EstimatorConfig,
) -> Result<DoaEstimate> {
    let solver = config.solver.with_beta(problem.budget(&grid));
    let coarse = estimate_on_grid(problem, k, grid, &solver)?;
    match &config.refinement {
        Some(r) => refine_estimate(problem, &coarse, r, &solver),
        None => Ok(coarse),
    }
}

/// C-l1SVD: complex element-space sparse recovery.
pub fn c_l1_svd(
    x: &SnapshotMatrix,
    geom: &UcaGeometry,
    k: usize,
    grid: Arc<DirectionGrid>,
    config: &EstimatorConfig,
) -> Result<DoaEstimate> {
    let start = Instant::now();
    let problem = ElementSpaceProblem::prepare(x, geom, k, config.confidence)?;
    let mut est = estimate(&problem, k, grid, config)?;
    est.wall_time = start.elapsed();
    Ok(est)
}

/// RB-l1SVD: real-valued beamspace sparse recovery.
pub fn rb_l1_svd(
    x: &SnapshotMatrix,
    geom: &UcaGeometry,
    k: usize,
    grid: Arc<DirectionGrid>,
    config: &EstimatorConfig,
) -> Result<DoaEstimate> {
    let start = Instant::now();
    let transform = Arc::new(build_fr(geom)?);
    let mut est = rb_l1_svd_with(x, transform, k, grid, config)?;
    est.wall_time = start.elapsed();
    Ok(est)
}

/// RB-l1SVD with a prebuilt transform.
pub fn rb_l1_svd_with(
    x: &SnapshotMatrix,
    transform: Arc<BeamspaceTransform>,
    k: usize,
    grid: Arc<DirectionGrid>,
    config: &EstimatorConfig,
) -> Result<DoaEstimate> {
    let start = Instant::now();
    let problem = BeamspaceProblem::prepare(x, transform, k, config.confidence)?
        .with_model_error_allowance(config.model_error_allowance);
    assert!(
        !<<BeamspaceProblem as RecoveryProblem>::Scalar as Scalar>::IS_COMPLEX,
        "beamspace program must be real-valued"
    );
    let mut est = estimate(&problem, k, grid, config)?;
    est.wall_time = start.elapsed();
    Ok(est)
}

//! Direction grids, the row-sparse convex program, spectra, peak picking and
//! the two sparse pipelines.

pub mod grid;
pub mod pipeline;
pub mod solver;
pub mod spectrum;

pub use grid::{build_grid, DirectionGrid};
pub use pipeline::{
    c_l1_svd, estimate, peak_separation, rb_l1_svd, rb_l1_svd_with, refine_estimate,
    refinement_grid, solve_on_grid, BeamspaceProblem, DoaEstimate, ElementSpaceProblem,
    EstimatorConfig, PipelineTag, RecoveryProblem, Refinement, SolveReport,
    PEAK_SEPARATION_RAYLEIGH,
};
pub use solver::{solve_group_l1, RowSparseSolution, SolverConfig};
pub use spectrum::{
    extract_peaks, extract_separated_peaks, extract_window_peaks, spectrum_from_solution, Peaks,
    SpatialSpectrum,
};

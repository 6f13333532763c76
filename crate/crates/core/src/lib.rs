//! Two-dimensional direction-of-arrival estimation for uniform circular
//! arrays, with a real-valued beamspace variant of the l1-SVD sparse
//! recovery method, its element-space counterpart, and a real-beamspace
//! MUSIC baseline.
//!
//! Angles are degrees at the public API and radians internally. Azimuth is
//! in `[0, 360)`, elevation (measured from the array normal) in `[0, 90)`.

pub mod array_model;
pub mod baselines;
pub mod beamspace;
pub mod error;
pub mod harness;
pub mod sparse;
pub mod special;
pub mod subspace;

pub use array_model::{
    array_pattern, manifold_matrix, steering_vector, synthesize_snapshots, Direction,
    SnapshotMatrix, SourceKind, SourceScenario, UcaGeometry,
};
pub use baselines::{rb_music, rb_music_spectrum, BeamspaceNoiseSubspace, MusicSpectrum};
pub use beamspace::{build_fr, max_mode_order, phase_mode_weights, BeamspaceTransform};
pub use error::{DoaError, Result};
pub use sparse::{
    build_grid, c_l1_svd, extract_peaks, rb_l1_svd, solve_group_l1, DirectionGrid, DoaEstimate,
    EstimatorConfig, PipelineTag, Refinement, SolverConfig, SpatialSpectrum,
};
pub use subspace::{noise_bound, signal_subspace_reduce, NoiseBound, NoiseComponents};

/// Complex double.
pub type C64 = nalgebra::Complex<f64>;

/// Field the sparse solver runs over: `f64` for the real beamspace pipeline,
/// [`C64`] for element space.
pub trait Scalar: nalgebra::ComplexField<RealField = f64> + Copy {
    const IS_COMPLEX: bool;
    /// Build a value from real and imaginary parts; real types drop `im`.
    fn from_parts(re: f64, im: f64) -> Self;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
}

impl Scalar for C64 {
    const IS_COMPLEX: bool = true;
    fn from_parts(re: f64, im: f64) -> Self {
        C64::new(re, im)
    }
}

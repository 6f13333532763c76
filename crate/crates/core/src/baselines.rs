//! Real-beamspace MUSIC baseline.

use nalgebra::DMatrix;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::array_model::{SnapshotMatrix, UcaGeometry};
use crate::beamspace::{build_fr, BeamspaceTransform};
use crate::error::{DoaError, Result};
use crate::sparse::{
    extract_separated_peaks, extract_window_peaks, peak_separation, refinement_grid, DirectionGrid,
    DoaEstimate, PipelineTag, Refinement, SpatialSpectrum,
};
use crate::C64;

/// MUSIC pseudo-spectrum `1 / ||E_n^T b||^2` over a grid.
#[derive(Debug, Clone)]
pub struct MusicSpectrum {
    pub spectrum: SpatialSpectrum,
}

/// Noise subspace of the real beamspace covariance `Re(F_r^H R F_r)`.
#[derive(Debug, Clone)]
pub struct BeamspaceNoiseSubspace {
    transform: Arc<BeamspaceTransform>,
    /// M' x (M' - K) orthonormal columns.
    basis: DMatrix<f64>,
    /// All eigenvalues of the real covariance, ascending.
    pub eigenvalues: Vec<f64>,
}

impl BeamspaceNoiseSubspace {
    pub fn estimate(
        x: &SnapshotMatrix,
        transform: Arc<BeamspaceTransform>,
        k: usize,
    ) -> Result<Self> {
        let beams = transform.beam_count();
        if k == 0 || k >= beams {
            return Err(DoaError::SourceCountOutOfRange { k, max: beams - 1 });
        }
        if x.n_sensors() != transform.geometry().n_sensors() {
            return Err(DoaError::DimensionMismatch {
                expected: transform.geometry().n_sensors(),
                actual: x.n_sensors(),
            });
        }
        let t = x.n_snapshots() as f64;
        let covariance = &x.entries * x.entries.adjoint() / C64::new(t, 0.0);
        let fr = transform.matrix();
        let beamspace = fr * covariance * fr.adjoint();
        let real: DMatrix<f64> = beamspace.map(|z| z.re);
        // Symmetrize against rounding before the real eigensolver.
        let real = (&real + real.transpose()) * 0.5;
        let eig = real.symmetric_eigen();
        let mut order: Vec<usize> = (0..beams).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let noise_dim = beams - k;
        let mut basis = DMatrix::zeros(beams, noise_dim);
        for (col, &idx) in order.iter().take(noise_dim).enumerate() {
            basis.set_column(col, &eig.eigenvectors.column(idx));
        }
        Ok(Self {
            transform,
            basis,
            eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    /// `||E_n^T b||^2` for every grid point.
    pub fn projections(&self, grid: &DirectionGrid) -> Vec<f64> {
        let b = self.transform.real_dictionary(grid.points());
        let proj = self.basis.transpose() * b;
        proj.column_iter().map(|c| c.norm_squared()).collect()
    }

    pub fn spectrum(&self, grid: Arc<DirectionGrid>) -> Result<MusicSpectrum> {
        let values = self
            .projections(&grid)
            .into_iter()
            .map(|p| if p > 0.0 { 1.0 / p } else { f64::MAX })
            .collect();
        Ok(MusicSpectrum {
            spectrum: SpatialSpectrum::new(grid, values)?,
        })
    }
}

/// RB-MUSIC pseudo-spectrum on `grid`.
pub fn rb_music_spectrum(
    x: &SnapshotMatrix,
    geom: &UcaGeometry,
    k: usize,
    grid: Arc<DirectionGrid>,
) -> Result<MusicSpectrum> {
    let transform = Arc::new(build_fr(geom)?);
    BeamspaceNoiseSubspace::estimate(x, transform, k)?.spectrum(grid)
}

/// RB-MUSIC estimate: K spectral peaks, optionally refined by re-evaluating
/// the pseudo-spectrum on a fine grid around each coarse peak.
pub fn rb_music(
    x: &SnapshotMatrix,
    geom: &UcaGeometry,
    k: usize,
    grid: Arc<DirectionGrid>,
    refinement: Option<&Refinement>,
) -> Result<DoaEstimate> {
    let start = Instant::now();
    let transform = Arc::new(build_fr(geom)?);
    let mut est = rb_music_with(x, transform, k, grid, refinement)?;
    est.wall_time = start.elapsed();
    Ok(est)
}

pub fn rb_music_with(
    x: &SnapshotMatrix,
    transform: Arc<BeamspaceTransform>,
    k: usize,
    grid: Arc<DirectionGrid>,
    refinement: Option<&Refinement>,
) -> Result<DoaEstimate> {
    let start = Instant::now();
    let separation = peak_separation(transform.geometry());
    let noise = BeamspaceNoiseSubspace::estimate(x, transform, k)?;
    let coarse_step = grid.azimuth_step();
    let coarse = noise.spectrum(grid)?;
    let peaks = extract_separated_peaks(&coarse.spectrum, k, separation)?;
    let (spectrum, peaks, refined) = match refinement {
        Some(r) => {
            let fine = Arc::new(refinement_grid(&peaks.directions, coarse_step, r)?);
            let fine = noise.spectrum(fine)?;
            let half_width = r.window_cells as f64 * coarse_step;
            let fine_peaks = extract_window_peaks(&fine.spectrum, &peaks.directions, half_width)?;
            (fine.spectrum, fine_peaks, true)
        }
        None => (coarse.spectrum, peaks, false),
    };
    Ok(DoaEstimate {
        directions: peaks.directions,
        spectrum,
        refined,
        pipeline_tag: PipelineTag::RealBeamspaceMusic,
        wall_time: Duration::ZERO.max(start.elapsed()),
        peaks_filled: peaks.filled_with_non_maxima,
        solves: Vec::new(),
    })
}

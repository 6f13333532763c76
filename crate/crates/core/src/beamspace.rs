//! Phase-mode excitation beamformers for uniform circular arrays.
//!
//! `F_e^H = C_v V^H` maps element space onto the 2M+1 phase modes
//! m = -M..M; for a continuous aperture its output is the centro-Hermitian
//! vector `J_|m|(zeta) e^{j m phi}`. `W^H` (a unitary DFT with
//! conjugate-centrosymmetric columns) then maps any centro-Hermitian
//! vector to a real one, so `F_r^H = W^H F_e^H` yields a real beamspace
//! manifold up to the aliasing terms introduced by sampling the aperture
//! with N sensors.

use nalgebra::{DMatrix, DVector};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::array_model::{manifold_matrix_unchecked, steering_vector, Direction, UcaGeometry};
use crate::error::{DoaError, Result};
use crate::special::bessel_j;
use crate::C64;

/// Highest usable phase mode, floor(k0 r).
pub fn max_mode_order(geom: &UcaGeometry) -> Result<usize> {
    let kr = geom.wavenumber_radius();
    let m = kr.floor();
    if m < 1.0 {
        return Err(DoaError::ArrayTooSmall {
            wavenumber_radius: kr,
        });
    }
    Ok(m as usize)
}

/// Weight vector `w_m` with `w_m^H = (1/N) [e^{j m gamma_0}, ..., e^{j m gamma_{N-1}}]`.
pub fn phase_mode_weights(geom: &UcaGeometry, m: i64) -> Result<DVector<C64>> {
    let n = geom.n_sensors();
    if 2 * m.unsigned_abs() as usize > n {
        return Err(DoaError::AliasedMode {
            mode: m,
            n_sensors: n,
        });
    }
    let scale = 1.0 / n as f64;
    Ok(DVector::from_iterator(
        n,
        (0..n).map(|i| C64::from_polar(scale, -(m as f64) * geom.sensor_angle(i))),
    ))
}

fn check_mode_support(geom: &UcaGeometry, mode_order: usize) -> Result<()> {
    if mode_order < 1 {
        return Err(DoaError::InvalidParameter("mode order must be >= 1".into()));
    }
    let required = 2 * mode_order + 1;
    if geom.n_sensors() < required {
        return Err(DoaError::TooFewSensors {
            n_sensors: geom.n_sensors(),
            mode_order,
            required,
        });
    }
    Ok(())
}

/// `j^{-|m|}`, the phase-mode compensation applied by `C_v`.
fn mode_compensation(m: i64) -> C64 {
    match m.unsigned_abs() % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// `F_e^H = C_v V^H` with `V = sqrt(N) [w_{-M} ... w_M]`; rows ordered m = -M..M.
pub fn build_fe(geom: &UcaGeometry, mode_order: usize) -> Result<DMatrix<C64>> {
    check_mode_support(geom, mode_order)?;
    let n = geom.n_sensors();
    let m_max = mode_order as i64;
    let beams = 2 * mode_order + 1;
    let scale = 1.0 / (n as f64).sqrt();
    let mut fe = DMatrix::zeros(beams, n);
    for (row, m) in (-m_max..=m_max).enumerate() {
        let c = mode_compensation(m);
        for col in 0..n {
            // Row of sqrt(N) w_m^H is (1/sqrt(N)) e^{j m gamma_n}.
            fe[(row, col)] = c * C64::from_polar(scale, m as f64 * geom.sensor_angle(col));
        }
    }
    Ok(fe)
}

/// Unitary `W` whose columns are `v(alpha_q) / sqrt(M')`, alpha_q = 2 pi q / M'.
///
/// Rows and columns are both indexed by -M..M, and `I~ W = W*` where `I~`
/// is the exchange matrix.
pub fn build_w(mode_order: usize) -> Result<DMatrix<C64>> {
    if mode_order < 1 {
        return Err(DoaError::InvalidParameter("mode order must be >= 1".into()));
    }
    let m_max = mode_order as i64;
    let beams = 2 * mode_order + 1;
    let scale = 1.0 / (beams as f64).sqrt();
    let mut w = DMatrix::zeros(beams, beams);
    for (col, q) in (-m_max..=m_max).enumerate() {
        let alpha = 2.0 * std::f64::consts::PI * q as f64 / beams as f64;
        for (row, p) in (-m_max..=m_max).enumerate() {
            w[(row, col)] = C64::from_polar(scale, p as f64 * alpha);
        }
    }
    Ok(w)
}

/// The real-beamspace transform `F_r^H` for one geometry.
#[derive(Debug)]
pub struct BeamspaceTransform {
    geometry: UcaGeometry,
    mode_order: usize,
    fr: DMatrix<C64>,
    // f64 bits of the largest relative imaginary residual seen so far.
    max_imag_residual: AtomicU64,
}

impl Clone for BeamspaceTransform {
    fn clone(&self) -> Self {
        Self {
            geometry: self.geometry,
            mode_order: self.mode_order,
            fr: self.fr.clone(),
            max_imag_residual: AtomicU64::new(self.max_imag_residual.load(Ordering::Relaxed)),
        }
    }
}

/// Build `F_r^H = W^H C_v V^H` with M = floor(k0 r).
pub fn build_fr(geom: &UcaGeometry) -> Result<BeamspaceTransform> {
    let mode_order = max_mode_order(geom)?;
    BeamspaceTransform::with_mode_order(geom, mode_order)
}

impl BeamspaceTransform {
    /// Build the transform with an explicit mode order instead of floor(k0 r).
    pub fn with_mode_order(geom: &UcaGeometry, mode_order: usize) -> Result<Self> {
        let fe = build_fe(geom, mode_order)?;
        let w = build_w(mode_order)?;
        Ok(Self {
            geometry: *geom,
            mode_order,
            fr: w.adjoint() * fe,
            max_imag_residual: AtomicU64::new(0f64.to_bits()),
        })
    }

    pub fn geometry(&self) -> &UcaGeometry {
        &self.geometry
    }

    pub fn mode_order(&self) -> usize {
        self.mode_order
    }

    /// M' = 2M + 1.
    pub fn beam_count(&self) -> usize {
        2 * self.mode_order + 1
    }

    /// The M' x N matrix `F_r^H`.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.fr
    }

    /// Largest relative imaginary residual `||Im b|| / ||Re b||` recorded by
    /// manifold evaluations on this transform.
    pub fn max_observed_imag_residual(&self) -> f64 {
        f64::from_bits(self.max_imag_residual.load(Ordering::Relaxed))
    }

    fn record_residual(&self, value: f64) {
        // Non-negative f64 bit patterns order like the floats themselves.
        self.max_imag_residual
            .fetch_max(value.to_bits(), Ordering::Relaxed);
    }

    /// `F_r^H a(phi, theta)` before discarding the imaginary part.
    pub fn beamspace_vector(&self, dir: &Direction) -> DVector<C64> {
        &self.fr * steering_vector(&self.geometry, dir)
    }

    /// Real beamspace manifold `b(phi, theta) = Re(F_r^H a(phi, theta))`.
    pub fn beamspace_manifold(&self, dir: &Direction) -> DVector<f64> {
        let (b, residual) = self.beamspace_manifold_with_residual(dir);
        let _ = residual;
        b
    }

    /// Real manifold together with its relative imaginary residual.
    pub fn beamspace_manifold_with_residual(&self, dir: &Direction) -> (DVector<f64>, f64) {
        let v = self.beamspace_vector(dir);
        let re = v.map(|z| z.re);
        let im = v.map(|z| z.im);
        let residual = relative_residual(re.norm(), im.norm());
        self.record_residual(residual);
        (re, residual)
    }

    /// Apply `F_r^H` to element-space data.
    pub fn apply(&self, element_space: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        if element_space.nrows() != self.geometry.n_sensors() {
            return Err(DoaError::DimensionMismatch {
                expected: self.geometry.n_sensors(),
                actual: element_space.nrows(),
            });
        }
        Ok(&self.fr * element_space)
    }

    /// Real dictionary `B = Re(F_r^H A)` over the given directions. Updates the
    /// residual diagnostic with the worst column.
    pub fn real_dictionary(&self, dirs: &[Direction]) -> DMatrix<f64> {
        let a = manifold_matrix_unchecked(&self.geometry, dirs);
        let b = &self.fr * a;
        let mut worst = 0.0f64;
        for col in b.column_iter() {
            let re: f64 = col.iter().map(|z| z.re * z.re).sum::<f64>().sqrt();
            let im: f64 = col.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
            worst = worst.max(relative_residual(re, im));
        }
        self.record_residual(worst);
        b.map(|z| z.re)
    }
}

impl BeamspaceTransform {
    /// Largest relative distance, over `dirs`, between the reduced real
    /// observation of one noiseless source and its own dictionary atom.
    ///
    /// For one source the stacked data are `[b e] R` with `b`, `e` the real
    /// and imaginary parts of `F_r^H a` and `R` a scaled rotation, so the
    /// K = 1 reduction returns the dominant left singular vector `w` of
    /// `[b e]`. The value is `||w - P_b w|| / ||w||`, which is second order
    /// in the imaginary residual.
    pub fn reduction_mismatch(&self, dirs: &[Direction]) -> f64 {
        let a = manifold_matrix_unchecked(&self.geometry, dirs);
        let c = &self.fr * a;
        let mut worst = 0.0f64;
        for col in c.column_iter() {
            let (mut g11, mut g12, mut g22) = (0.0, 0.0, 0.0);
            for z in col.iter() {
                g11 += z.re * z.re;
                g12 += z.re * z.im;
                g22 += z.im * z.im;
            }
            if g11 <= 0.0 {
                continue;
            }
            let half = 0.5 * (g11 - g22);
            let lambda = 0.5 * (g11 + g22) + (half * half + g12 * g12).sqrt();
            let (p, q) = if g11 >= g22 {
                (lambda - g22, g12)
            } else {
                (g12, lambda - g11)
            };
            let ww = p * p * g11 + 2.0 * p * q * g12 + q * q * g22;
            if ww <= 0.0 {
                continue;
            }
            let bw = p * g11 + q * g12;
            let off = (ww - bw * bw / g11).max(0.0) / ww;
            worst = worst.max(off.sqrt());
        }
        worst
    }
}

fn relative_residual(re_norm: f64, im_norm: f64) -> f64 {
    if re_norm > 0.0 {
        im_norm / re_norm
    } else if im_norm > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Principal term and truncated aliasing sum of the sampled phase-mode pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeResidualReport {
    pub mode: i64,
    /// |J_m(zeta)|.
    pub principal_magnitude: f64,
    /// Sum over q = 1..q_max of |J_{Nq-m}(zeta)| + |J_{Nq+m}(zeta)|.
    pub residual_magnitude: f64,
    pub q_terms_used: usize,
}

pub fn mode_residual(
    geom: &UcaGeometry,
    m: i64,
    dir: &Direction,
    q_max: usize,
) -> Result<ModeResidualReport> {
    if q_max < 1 {
        return Err(DoaError::InvalidParameter("q_max must be >= 1".into()));
    }
    let n = geom.n_sensors() as i64;
    if 2 * m.abs() > n {
        return Err(DoaError::AliasedMode {
            mode: m,
            n_sensors: geom.n_sensors(),
        });
    }
    let zeta = geom.zeta(dir);
    let residual = (1..=q_max as i64)
        .map(|q| bessel_j(n * q - m, zeta).abs() + bessel_j(n * q + m, zeta).abs())
        .sum();
    Ok(ModeResidualReport {
        mode: m,
        principal_magnitude: bessel_j(m, zeta).abs(),
        residual_magnitude: residual,
        q_terms_used: q_max,
    })
}

//! Uniform circular array geometry, steering vectors and synthetic
//! snapshot generation.
//!
//! Angles are degrees at every public interface and radians internally.
//! Azimuth is measured in the array plane from the x axis, elevation from
//! the array normal (z axis), so a source at elevation 0 sits on broadside
//! and every sensor sees the same phase.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{DoaError, Result};
use crate::C64;

/// N omnidirectional sensors equally spaced on a circle of radius r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryRaw")]
pub struct UcaGeometry {
    n_sensors: usize,
    radius_over_wavelength: f64,
}

#[derive(Deserialize)]
struct GeometryRaw {
    n_sensors: usize,
    radius_over_wavelength: f64,
}

impl TryFrom<GeometryRaw> for UcaGeometry {
    type Error = DoaError;
    fn try_from(raw: GeometryRaw) -> Result<Self> {
        UcaGeometry::new(raw.n_sensors, raw.radius_over_wavelength)
    }
}

impl UcaGeometry {
    pub fn new(n_sensors: usize, radius_over_wavelength: f64) -> Result<Self> {
        if n_sensors < 3 {
            return Err(DoaError::InvalidGeometry(format!(
                "a circular array needs at least 3 sensors, got {n_sensors}"
            )));
        }
        if !(radius_over_wavelength > 0.0 && radius_over_wavelength.is_finite()) {
            return Err(DoaError::InvalidGeometry(format!(
                "radius/wavelength must be positive, got {radius_over_wavelength}"
            )));
        }
        Ok(Self {
            n_sensors,
            radius_over_wavelength,
        })
    }

    pub fn n_sensors(&self) -> usize {
        self.n_sensors
    }

    pub fn radius_over_wavelength(&self) -> f64 {
        self.radius_over_wavelength
    }

    /// k0 * r = 2 pi r / lambda.
    pub fn wavenumber_radius(&self) -> f64 {
        2.0 * PI * self.radius_over_wavelength
    }

    /// Angular position of sensor `n` in radians, 2 pi n / N.
    pub fn sensor_angle(&self, n: usize) -> f64 {
        2.0 * PI * n as f64 / self.n_sensors as f64
    }

    pub fn sensor_angles(&self) -> Vec<f64> {
        (0..self.n_sensors).map(|n| self.sensor_angle(n)).collect()
    }

    /// Electrical aperture seen from a direction, k0 r sin(theta).
    pub fn zeta(&self, dir: &Direction) -> f64 {
        self.wavenumber_radius() * dir.elevation_rad().sin()
    }

    /// Radius of the main beam in direction cosines: the first zero of
    /// `J_0(k0 r rho)`.
    pub fn rayleigh_radius(&self) -> f64 {
        FIRST_J0_ZERO / self.wavenumber_radius()
    }
}

const FIRST_J0_ZERO: f64 = 2.404_825_557_695_773;

/// A look direction. Azimuth is kept reduced to [0, 360), elevation must
/// lie in [0, 90).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DirectionRaw")]
pub struct Direction {
    azimuth_deg: f64,
    elevation_deg: f64,
}

#[derive(Deserialize)]
struct DirectionRaw {
    azimuth_deg: f64,
    elevation_deg: f64,
}

impl TryFrom<DirectionRaw> for Direction {
    type Error = DoaError;
    fn try_from(raw: DirectionRaw) -> Result<Self> {
        Direction::new(raw.azimuth_deg, raw.elevation_deg)
    }
}

impl Direction {
    pub fn new(azimuth_deg: f64, elevation_deg: f64) -> Result<Self> {
        if !azimuth_deg.is_finite() {
            return Err(DoaError::InvalidDirection(format!(
                "azimuth must be finite, got {azimuth_deg}"
            )));
        }
        if !(0.0..90.0).contains(&elevation_deg) {
            return Err(DoaError::InvalidDirection(format!(
                "elevation must lie in [0, 90), got {elevation_deg}"
            )));
        }
        Ok(Self {
            azimuth_deg: reduce_azimuth(azimuth_deg),
            elevation_deg,
        })
    }

    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth_deg
    }

    pub fn elevation_deg(&self) -> f64 {
        self.elevation_deg
    }

    pub fn azimuth_rad(&self) -> f64 {
        self.azimuth_deg.to_radians()
    }

    pub fn elevation_rad(&self) -> f64 {
        self.elevation_deg.to_radians()
    }

    /// `(sin(theta) cos(phi), sin(theta) sin(phi))`.
    pub fn direction_cosines(&self) -> (f64, f64) {
        let r = self.elevation_rad().sin();
        let (s, c) = self.azimuth_rad().sin_cos();
        (r * c, r * s)
    }

    /// Euclidean distance between two directions in direction cosines.
    pub fn cosine_distance(&self, other: &Direction) -> f64 {
        let (u0, v0) = self.direction_cosines();
        let (u1, v1) = other.direction_cosines();
        (u0 - u1).hypot(v0 - v1)
    }
}

/// Reduce an azimuth in degrees to [0, 360).
pub fn reduce_azimuth(azimuth_deg: f64) -> f64 {
    let r = azimuth_deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs.
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Waveform model for the impinging sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    /// I.i.d. unit-power circular complex Gaussian samples per snapshot.
    #[default]
    ComplexGaussian,
    /// Every source emits the constant 1 in every snapshot.
    UnitConstant,
}

/// Everything needed to synthesize one batch of snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceScenario {
    directions: Vec<Direction>,
    pub source_kind: SourceKind,
    pub snr_db: f64,
    /// When set, no noise is added and `snr_db` is ignored.
    pub noiseless: bool,
    n_snapshots: usize,
    pub rng_seed: u64,
}

impl SourceScenario {
    pub fn new(
        directions: Vec<Direction>,
        snr_db: f64,
        n_snapshots: usize,
        rng_seed: u64,
    ) -> Result<Self> {
        if directions.is_empty() {
            return Err(DoaError::InvalidScenario(
                "at least one source is required".into(),
            ));
        }
        if n_snapshots == 0 {
            return Err(DoaError::InvalidScenario(
                "at least one snapshot is required".into(),
            ));
        }
        for (i, a) in directions.iter().enumerate() {
            if directions[i + 1..].iter().any(|b| a == b) {
                return Err(DoaError::InvalidScenario(format!(
                    "duplicate source direction ({}, {})",
                    a.azimuth_deg, a.elevation_deg
                )));
            }
        }
        if !snr_db.is_finite() {
            return Err(DoaError::InvalidScenario(
                "snr_db must be finite; use the noiseless flag for noise-free data".into(),
            ));
        }
        Ok(Self {
            directions,
            source_kind: SourceKind::ComplexGaussian,
            snr_db,
            noiseless: false,
            n_snapshots,
            rng_seed,
        })
    }

    pub fn noiseless(mut self) -> Self {
        self.noiseless = true;
        self
    }

    pub fn with_source_kind(mut self, kind: SourceKind) -> Self {
        self.source_kind = kind;
        self
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn n_sources(&self) -> usize {
        self.directions.len()
    }

    pub fn n_snapshots(&self) -> usize {
        self.n_snapshots
    }

    /// Noise variance per complex sensor sample, 10^(-SNR/10), or 0.
    pub fn noise_variance(&self) -> f64 {
        if self.noiseless {
            0.0
        } else {
            10f64.powf(-self.snr_db / 10.0)
        }
    }
}

/// Array output X (N x T) together with the noise variance it was made with.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    pub entries: DMatrix<C64>,
    pub noise_variance: f64,
}

impl SnapshotMatrix {
    pub fn new(entries: DMatrix<C64>, noise_variance: f64) -> Result<Self> {
        if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
            return Err(DoaError::InvalidParameter(format!(
                "noise variance must be finite and non-negative, got {noise_variance}"
            )));
        }
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(DoaError::InvalidParameter(
                "snapshot matrix is empty".into(),
            ));
        }
        Ok(Self {
            entries,
            noise_variance,
        })
    }

    pub fn n_sensors(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_snapshots(&self) -> usize {
        self.entries.ncols()
    }
}

/// a(phi, theta): element n is exp(j zeta cos(phi - gamma_n)).
pub fn steering_vector(geom: &UcaGeometry, dir: &Direction) -> DVector<C64> {
    let zeta = geom.zeta(dir);
    let phi = dir.azimuth_rad();
    DVector::from_iterator(
        geom.n_sensors(),
        (0..geom.n_sensors()).map(|n| {
            let phase = zeta * (phi - geom.sensor_angle(n)).cos();
            C64::from_polar(1.0, phase)
        }),
    )
}

/// Stack steering vectors of `dirs` as the columns of an N x K matrix.
pub fn manifold_matrix(geom: &UcaGeometry, dirs: &[Direction]) -> Result<DMatrix<C64>> {
    if dirs.is_empty() {
        return Err(DoaError::InvalidParameter(
            "manifold matrix needs at least one direction".into(),
        ));
    }
    Ok(manifold_matrix_unchecked(geom, dirs))
}

pub(crate) fn manifold_matrix_unchecked(geom: &UcaGeometry, dirs: &[Direction]) -> DMatrix<C64> {
    let n = geom.n_sensors();
    let gammas = geom.sensor_angles();
    let mut a = DMatrix::zeros(n, dirs.len());
    for (k, dir) in dirs.iter().enumerate() {
        let zeta = geom.zeta(dir);
        let phi = dir.azimuth_rad();
        for (i, g) in gammas.iter().enumerate() {
            a[(i, k)] = C64::from_polar(1.0, zeta * (phi - g).cos());
        }
    }
    a
}

/// f = w^H a(phi, theta).
pub fn array_pattern(geom: &UcaGeometry, weights: &DVector<C64>, dir: &Direction) -> Result<C64> {
    if weights.len() != geom.n_sensors() {
        return Err(DoaError::DimensionMismatch {
            expected: geom.n_sensors(),
            actual: weights.len(),
        });
    }
    Ok(weights.dotc(&steering_vector(geom, dir)))
}

fn complex_gaussian(rng: &mut ChaCha8Rng, variance: f64) -> C64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(s * re, s * im)
}

/// X = A S + E with unit-power sources and white noise at the scenario SNR.
/// The same seed always reproduces the same matrix.
pub fn synthesize_snapshots(geom: &UcaGeometry, scenario: &SourceScenario) -> SnapshotMatrix {
    let k = scenario.n_sources();
    let t = scenario.n_snapshots();
    let n = geom.n_sensors();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.rng_seed);

    let signals = match scenario.source_kind {
        SourceKind::ComplexGaussian => {
            DMatrix::from_fn(k, t, |_, _| complex_gaussian(&mut rng, 1.0))
        }
        SourceKind::UnitConstant => DMatrix::from_element(k, t, C64::new(1.0, 0.0)),
    };
    let a = manifold_matrix_unchecked(geom, scenario.directions());
    let mut x = &a * &signals;

    let sigma_sq = scenario.noise_variance();
    if sigma_sq > 0.0 {
        for col in 0..t {
            for row in 0..n {
                x[(row, col)] += complex_gaussian(&mut rng, sigma_sq);
            }
        }
    }
    SnapshotMatrix {
        entries: x,
        noise_variance: sigma_sq,
    }
}

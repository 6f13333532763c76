use std::collections::HashMap;

use crate::array_model::{reduce_azimuth, Direction};
use crate::error::{DoaError, Result};

const EPS: f64 = 1e-9;

/// Candidate directions for the sparse dictionary.
///
/// Points live on a lattice `az = az0 + i * az_step`, `el = el0 + j * el_step`.
/// A rectangular grid fills a block of lattice cells; a refined grid is a
/// union of blocks around coarse estimates. Points are flattened
/// elevation-major: all azimuths of the lowest elevation first.
#[derive(Debug, Clone)]
pub struct DirectionGrid {
    az_origin: f64,
    el_origin: f64,
    az_step: f64,
    el_step: f64,
    // Lattice period in azimuth when the lattice closes on itself around 360 degrees.
    az_period: Option<i64>,
    cells: Vec<(i64, i64)>,
    points: Vec<Direction>,
    lookup: HashMap<(i64, i64), usize>,
}

fn sample_count(start: f64, end: f64, step: f64) -> usize {
    ((end - start) / step + EPS).floor() as usize + 1
}

fn lattice_period(step: f64) -> Option<i64> {
    let n = 360.0 / step;
    let r = n.round();
    ((n - r).abs() < 1e-6 && r >= 1.0).then_some(r as i64)
}

fn el_max_index(step_deg: f64) -> i64 {
    ((90.0 - EPS) / step_deg).ceil() as i64 - 1
}

/// Lattice cells of the windows `center +- half_width` at `step_deg`,
/// sorted elevation-major without duplicates.
fn window_cells(
    centers: &[Direction],
    half_width_deg: f64,
    step_deg: f64,
) -> Result<(Option<i64>, Vec<(i64, i64)>)> {
    if centers.is_empty() {
        return Err(DoaError::EmptyGrid("no window centers".into()));
    }
    if !(step_deg > 0.0) || !(half_width_deg >= 0.0) {
        return Err(DoaError::InvalidParameter(format!(
            "window half-width {half_width_deg} and step {step_deg} must be positive"
        )));
    }
    let period = lattice_period(step_deg);
    let el_max_index = el_max_index(step_deg);
    let mut cells = Vec::new();
    for c in centers {
        let i_lo = ((c.azimuth_deg() - half_width_deg) / step_deg - EPS).ceil() as i64;
        let i_hi = ((c.azimuth_deg() + half_width_deg) / step_deg + EPS).floor() as i64;
        let j_lo = (((c.elevation_deg() - half_width_deg) / step_deg - EPS).ceil() as i64).max(0);
        let j_hi = (((c.elevation_deg() + half_width_deg) / step_deg + EPS).floor() as i64)
            .min(el_max_index);
        for j in j_lo..=j_hi {
            for i in i_lo..=i_hi {
                let i = match period {
                    Some(p) => i.rem_euclid(p),
                    None => i,
                };
                cells.push((i, j));
            }
        }
    }
    cells.sort_by_key(|&(i, j)| (j, i));
    cells.dedup();
    Ok((period, cells))
}

/// Uniform grid over a rectangular region, endpoints included when the step
/// reaches them.
pub fn build_grid(
    az_start: f64,
    az_end: f64,
    el_start: f64,
    el_end: f64,
    step_deg: f64,
) -> Result<DirectionGrid> {
    DirectionGrid::rectangular(az_start, az_end, el_start, el_end, step_deg)
}

impl DirectionGrid {
    pub fn rectangular(
        az_start: f64,
        az_end: f64,
        el_start: f64,
        el_end: f64,
        step_deg: f64,
    ) -> Result<Self> {
        if !(step_deg > 0.0 && step_deg.is_finite()) {
            return Err(DoaError::InvalidParameter(format!(
                "grid step must be positive, got {step_deg}"
            )));
        }
        if !(az_start <= az_end) || !(el_start <= el_end) {
            return Err(DoaError::EmptyGrid(format!(
                "azimuth [{az_start}, {az_end}] x elevation [{el_start}, {el_end}]"
            )));
        }
        if az_start < 0.0 || az_end >= 360.0 {
            return Err(DoaError::InvalidParameter(format!(
                "azimuth range [{az_start}, {az_end}] must lie within [0, 360)"
            )));
        }
        if el_start < 0.0 || el_end >= 90.0 {
            return Err(DoaError::InvalidParameter(format!(
                "elevation range [{el_start}, {el_end}] must lie within [0, 90)"
            )));
        }
        let n_az = sample_count(az_start, az_end, step_deg);
        let n_el = sample_count(el_start, el_end, step_deg);
        // Wraparound only when the azimuth samples close the full circle.
        let az_period = lattice_period(step_deg).filter(|&p| p as usize == n_az);
        let cells = (0..n_el as i64)
            .flat_map(|j| (0..n_az as i64).map(move |i| (i, j)))
            .collect();
        Self::from_cells(az_start, el_start, step_deg, step_deg, az_period, cells)
    }

    /// The whole domain [0, 360) x [0, 90) at the given step.
    pub fn full(step_deg: f64) -> Result<Self> {
        let n_az = sample_count(0.0, 360.0 - step_deg * 0.5, step_deg);
        let n_el = sample_count(0.0, 90.0 - step_deg * 0.5, step_deg);
        Self::rectangular(
            0.0,
            (n_az - 1) as f64 * step_deg,
            0.0,
            (n_el - 1) as f64 * step_deg,
            step_deg,
        )
    }

    /// Union of square windows of half-width `half_width_deg` around each
    /// center, sampled on the lattice of multiples of `step_deg`.
    pub fn window_union(centers: &[Direction], half_width_deg: f64, step_deg: f64) -> Result<Self> {
        let (period, cells) = window_cells(centers, half_width_deg, step_deg)?;
        Self::from_cells(0.0, 0.0, step_deg, step_deg, period, cells)
    }

    /// Windows of `step_deg` around `centers` plus every point of `self`
    /// outside them, snapped to the fine lattice. Points outside the windows
    /// have no neighbors at the fine spacing.
    pub fn refine_around(
        &self,
        centers: &[Direction],
        half_width_deg: f64,
        step_deg: f64,
    ) -> Result<Self> {
        let (period, mut cells) = window_cells(centers, half_width_deg, step_deg)?;
        let el_max_index = el_max_index(step_deg);
        for d in &self.points {
            let inside = centers.iter().any(|c| {
                let diff = reduce_azimuth(d.azimuth_deg() - c.azimuth_deg());
                diff.min(360.0 - diff) <= half_width_deg + EPS
                    && (d.elevation_deg() - c.elevation_deg()).abs() <= half_width_deg + EPS
            });
            if !inside {
                let mut i = (d.azimuth_deg() / step_deg).round() as i64;
                if let Some(p) = period {
                    i = i.rem_euclid(p);
                }
                let j = ((d.elevation_deg() / step_deg).round() as i64).min(el_max_index);
                cells.push((i, j));
            }
        }
        cells.sort_by_key(|&(i, j)| (j, i));
        cells.dedup();
        Self::from_cells(0.0, 0.0, step_deg, step_deg, period, cells)
    }

    fn from_cells(
        az_origin: f64,
        el_origin: f64,
        az_step: f64,
        el_step: f64,
        az_period: Option<i64>,
        cells: Vec<(i64, i64)>,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(DoaError::EmptyGrid("no grid points".into()));
        }
        let mut points = Vec::with_capacity(cells.len());
        let mut lookup = HashMap::with_capacity(cells.len());
        for (idx, &(i, j)) in cells.iter().enumerate() {
            let az = reduce_azimuth(az_origin + i as f64 * az_step);
            let el = el_origin + j as f64 * el_step;
            points.push(Direction::new(az, el)?);
            lookup.insert((i, j), idx);
        }
        Ok(Self {
            az_origin,
            el_origin,
            az_step,
            el_step,
            az_period,
            cells,
            points,
            lookup,
        })
    }

    pub fn points(&self) -> &[Direction] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn azimuth_step(&self) -> f64 {
        self.az_step
    }

    pub fn elevation_step(&self) -> f64 {
        self.el_step
    }

    /// Distinct azimuth values, ascending.
    pub fn azimuth_samples(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.points.iter().map(|d| d.azimuth_deg()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < EPS);
        v
    }

    /// Distinct elevation values, ascending.
    pub fn elevation_samples(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.points.iter().map(|d| d.elevation_deg()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < EPS);
        v
    }

    /// Indices of the grid points in the 8-neighborhood of `index`.
    /// Azimuth wraps when the lattice closes around the circle; elevation never wraps.
    pub fn neighbors(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.cells[index];
        (-1i64..=1)
            .flat_map(move |dj| (-1i64..=1).map(move |di| (di, dj)))
            .filter(|&(di, dj)| di != 0 || dj != 0)
            .filter_map(move |(di, dj)| {
                let mut ni = i + di;
                if let Some(p) = self.az_period {
                    ni = ni.rem_euclid(p);
                }
                self.lookup.get(&(ni, j + dj)).copied()
            })
            .filter(move |&n| n != index)
    }

    /// Index of the grid point at `dir`, if it is one.
    pub fn index_of(&self, dir: &Direction) -> Option<usize> {
        let fi = (dir.azimuth_deg() - self.az_origin) / self.az_step;
        let fj = (dir.elevation_deg() - self.el_origin) / self.el_step;
        let mut i = fi.round() as i64;
        let j = fj.round() as i64;
        if (fj - j as f64).abs() > 1e-6 {
            return None;
        }
        if (fi - fi.round()).abs() > 1e-6 {
            // Azimuth may sit on the lattice only after adding a full turn.
            let alt = (dir.azimuth_deg() + 360.0 - self.az_origin) / self.az_step;
            if (alt - alt.round()).abs() > 1e-6 {
                return None;
            }
            i = alt.round() as i64;
        }
        if let Some(p) = self.az_period {
            i = i.rem_euclid(p);
        }
        self.lookup.get(&(i, j)).copied()
    }
}

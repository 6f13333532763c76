use std::sync::Arc;

use super::grid::DirectionGrid;
use super::solver::RowSparseSolution;
use crate::array_model::Direction;
use crate::error::{DoaError, Result};
use crate::Scalar;

/// Non-negative values over the points of a grid.
#[derive(Debug, Clone)]
pub struct SpatialSpectrum {
    pub grid: Arc<DirectionGrid>,
    pub values: Vec<f64>,
}

impl SpatialSpectrum {
    pub fn new(grid: Arc<DirectionGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(DoaError::DimensionMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(DoaError::InvalidParameter(
                "spectrum values must be non-negative".into(),
            ));
        }
        Ok(Self { grid, values })
    }
}

/// Row 2-norms of the coefficient matrix, one per grid point.
pub fn spectrum_from_solution<T: Scalar>(
    solution: &RowSparseSolution<T>,
    grid: Arc<DirectionGrid>,
) -> Result<SpatialSpectrum> {
    if solution.coefficients.nrows() != grid.len() {
        return Err(DoaError::DimensionMismatch {
            expected: grid.len(),
            actual: solution.coefficients.nrows(),
        });
    }
    SpatialSpectrum::new(grid, solution.row_norms())
}

/// The K strongest peaks of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Peaks {
    pub indices: Vec<usize>,
    pub directions: Vec<Direction>,
    pub values: Vec<f64>,
    /// Set when fewer than K local maxima existed and non-maxima filled the rest.
    pub filled_with_non_maxima: bool,
}

/// Pick the K largest local maxima (8-neighborhood, azimuth wraparound where
/// the grid closes); ties go to the lower flattened index.
pub fn extract_peaks(spectrum: &SpatialSpectrum, k: usize) -> Result<Peaks> {
    extract_separated_peaks(spectrum, k, 0.0)
}

/// Like [`extract_peaks`], but a candidate closer than `min_separation` (in
/// direction cosines) to an already chosen, stronger peak is skipped. Near
/// the array plane many grid points map to almost the same direction
/// cosines, and one source then shows up as several local maxima.
pub fn extract_separated_peaks(
    spectrum: &SpatialSpectrum,
    k: usize,
    min_separation: f64,
) -> Result<Peaks> {
    if k == 0 {
        return Err(DoaError::InvalidParameter("need at least one peak".into()));
    }
    if !(min_separation >= 0.0) {
        return Err(DoaError::InvalidParameter(format!(
            "peak separation must be >= 0, got {min_separation}"
        )));
    }
    let values = &spectrum.values;
    if values.iter().all(|v| *v == 0.0) {
        return Err(DoaError::NoPeaks);
    }
    let grid = &spectrum.grid;
    let points = grid.points();
    if k > points.len() {
        return Err(DoaError::InvalidParameter(
            "more peaks requested than grid points".into(),
        ));
    }
    let is_max: Vec<bool> = (0..values.len())
        .map(|i| values[i] > 0.0 && grid.neighbors(i).all(|n| values[i] >= values[n]))
        .collect();

    let by_value = |a: &usize, b: &usize| values[*b].total_cmp(&values[*a]).then(a.cmp(b));
    let mut maxima: Vec<usize> = (0..values.len()).filter(|&i| is_max[i]).collect();
    maxima.sort_by(by_value);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let separated = |chosen: &[usize], i: usize| {
        chosen
            .iter()
            .all(|&c| points[c].cosine_distance(&points[i]) >= min_separation)
    };
    for &i in &maxima {
        if chosen.len() == k {
            break;
        }
        if separated(&chosen, i) {
            chosen.push(i);
        }
    }
    let filled = chosen.len() < k;
    if filled {
        let mut rest: Vec<usize> = (0..values.len()).filter(|i| !chosen.contains(i)).collect();
        rest.sort_by(by_value);
        for &i in &rest {
            if chosen.len() == k {
                break;
            }
            if separated(&chosen, i) {
                chosen.push(i);
            }
        }
        for &i in &rest {
            if chosen.len() == k {
                break;
            }
            if !chosen.contains(&i) {
                chosen.push(i);
            }
        }
        chosen.sort_by(by_value);
    }
    Ok(Peaks {
        directions: chosen.iter().map(|&i| points[i]).collect(),
        values: chosen.iter().map(|&i| values[i]).collect(),
        indices: chosen,
        filled_with_non_maxima: filled,
    })
}

/// One peak per window for a refined spectrum: for each center, in order,
/// the strongest local maximum within `half_width_deg` (wrapped azimuth) that
/// no earlier center has claimed, or the strongest unclaimed point of the
/// window when it holds no maximum. Result is ordered by value.
pub fn extract_window_peaks(
    spectrum: &SpatialSpectrum,
    centers: &[Direction],
    half_width_deg: f64,
) -> Result<Peaks> {
    if centers.is_empty() {
        return Err(DoaError::InvalidParameter("need at least one peak".into()));
    }
    let values = &spectrum.values;
    if values.iter().all(|v| *v == 0.0) {
        return Err(DoaError::NoPeaks);
    }
    let grid = &spectrum.grid;
    let is_max: Vec<bool> = (0..values.len())
        .map(|i| values[i] > 0.0 && grid.neighbors(i).all(|n| values[i] >= values[n]))
        .collect();
    let better = |a: usize, b: usize| values[a] > values[b] || (values[a] == values[b] && a < b);
    let reach = half_width_deg + 1e-9;

    let mut taken = vec![false; values.len()];
    let mut chosen = Vec::with_capacity(centers.len());
    let mut filled = false;
    for c in centers {
        let mut best_max: Option<usize> = None;
        let mut best_any: Option<usize> = None;
        for (i, d) in grid.points().iter().enumerate() {
            if taken[i] {
                continue;
            }
            let da = (d.azimuth_deg() - c.azimuth_deg()).rem_euclid(360.0);
            let da = da.min(360.0 - da);
            if da > reach || (d.elevation_deg() - c.elevation_deg()).abs() > reach {
                continue;
            }
            if is_max[i] && best_max.is_none_or(|b| better(i, b)) {
                best_max = Some(i);
            }
            if best_any.is_none_or(|b| better(i, b)) {
                best_any = Some(i);
            }
        }
        let pick = match (best_max, best_any) {
            (Some(i), _) => i,
            (None, Some(i)) => {
                filled = true;
                i
            }
            (None, None) => {
                filled = true;
                (0..values.len())
                    .filter(|&i| !taken[i])
                    .reduce(|a, b| if better(b, a) { b } else { a })
                    .ok_or_else(|| {
                        DoaError::InvalidParameter("more peaks requested than grid points".into())
                    })?
            }
        };
        taken[pick] = true;
        chosen.push(pick);
    }
    chosen.sort_by(|a, b| values[*b].total_cmp(&values[*a]).then(a.cmp(b)));
    Ok(Peaks {
        directions: chosen.iter().map(|&i| grid.points()[i]).collect(),
        values: chosen.iter().map(|&i| values[i]).collect(),
        indices: chosen,
        filled_with_non_maxima: filled,
    })
}

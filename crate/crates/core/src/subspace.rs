//! Signal-subspace reduction by SVD and the chi-square noise bound used as
//! the residual budget of the sparse recovery program.

use nalgebra::DMatrix;

use crate::error::{DoaError, Result};
use crate::special::chi_square_quantile;
use crate::{Scalar, C64};

/// Data projected onto the right singular vectors of its K largest singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedData<T: Scalar> {
    /// `X V_s`: rows x K.
    pub matrix: DMatrix<T>,
    pub source_count: usize,
    /// Every singular value of the input, descending.
    pub singular_values: Vec<f64>,
}

fn reduce<T: Scalar>(x: &DMatrix<T>, k: usize) -> Result<ReducedData<T>> {
    let max = x.nrows().min(x.ncols());
    if k < 1 || k > max {
        return Err(DoaError::SourceCountOutOfRange { k, max });
    }
    let svd = x.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut v_s = DMatrix::<T>::zeros(x.ncols(), k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        for row in 0..x.ncols() {
            v_s[(row, col)] = v_t[(idx, row)].conjugate();
        }
    }
    Ok(ReducedData {
        matrix: x * v_s,
        source_count: k,
        singular_values: order.iter().map(|&i| svd.singular_values[i]).collect(),
    })
}

/// `X_SV = X V_s` for complex element-space snapshots.
pub fn signal_subspace_reduce(x: &DMatrix<C64>, k: usize) -> Result<ReducedData<C64>> {
    reduce(x, k)
}

/// `Y_sv = Ybar V_s` computed entirely in real arithmetic.
pub fn real_subspace_reduce(y_bar: &DMatrix<f64>, k: usize) -> Result<ReducedData<f64>> {
    reduce(y_bar, k)
}

/// `[Re(Y) | Im(Y)]`.
pub fn stack_real_imag(y: &DMatrix<C64>) -> DMatrix<f64> {
    let (rows, cols) = y.shape();
    DMatrix::from_fn(rows, 2 * cols, |r, c| {
        if c < cols {
            y[(r, c)].re
        } else {
            y[(r, c - cols)].im
        }
    })
}

/// How the noise entries of the residual are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseComponents {
    /// `dof` real Gaussian components, each of variance sigma^2 / 2.
    RealPart,
    /// `dof` circular complex entries of variance sigma^2, i.e. 2 * dof
    /// real components of variance sigma^2 / 2.
    ComplexEntry,
}

/// Residual-norm budget `beta` holding with the given confidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBound {
    pub beta: f64,
    pub confidence: f64,
    /// Real degrees of freedom of the chi-square law.
    pub dof: usize,
    pub variance_per_component: f64,
}

/// `beta = sqrt(v * Q(confidence; dof))` with Q the chi-square quantile.
pub fn noise_bound(
    sigma_sq: f64,
    dof: usize,
    confidence: f64,
    components: NoiseComponents,
) -> Result<NoiseBound> {
    if !(sigma_sq > 0.0 && sigma_sq.is_finite()) {
        return Err(DoaError::InvalidParameter(format!(
            "noise variance must be positive, got {sigma_sq}"
        )));
    }
    if dof == 0 {
        return Err(DoaError::InvalidParameter("dof must be >= 1".into()));
    }
    let real_dof = match components {
        NoiseComponents::RealPart => dof,
        NoiseComponents::ComplexEntry => 2 * dof,
    };
    let variance_per_component = 0.5 * sigma_sq;
    let q = chi_square_quantile(confidence, real_dof)?;
    Ok(NoiseBound {
        beta: (variance_per_component * q).sqrt(),
        confidence,
        dof: real_dof,
        variance_per_component,
    })
}

/// Noise-floor estimate: mean squared singular value beyond the K-th,
/// divided by the longer matrix dimension.
pub fn estimate_noise_variance(
    singular_values: &[f64],
    k: usize,
    n_rows: usize,
    n_cols: usize,
) -> Result<f64> {
    let rank = n_rows.min(n_cols);
    if k >= rank || k >= singular_values.len() {
        return Err(DoaError::SourceCountOutOfRange {
            k,
            max: rank.min(singular_values.len()).saturating_sub(1),
        });
    }
    let tail = &singular_values[k..];
    let mean = tail.iter().map(|s| s * s).sum::<f64>() / tail.len() as f64;
    Ok(mean / n_rows.max(n_cols) as f64)
}

//! Row-sparse recovery:
//!
//! ```text
//! minimize   sum_i ||S(i, :)||_2
//! subject to ||Y - D S||_F <= beta
//! ```
//!
//! The reduced observation `Y` has few rows (at most the sensor count), so
//! the dual program
//!
//! ```text
//! maximize   Re<U, Y> - beta ||U||_F
//! subject to ||d_i^H U||_2 <= 1   for every atom i
//! ```
//!
//! has only `rows * K` unknowns (twice that for complex data) however large
//! the grid is. It is solved with a log-barrier path-following Newton method;
//! each step costs `O(P n^2)` for `n` real dual unknowns. The primal
//! coefficients are read off the barrier multipliers,
//! `S(i,:) = 2 / (t (1 - ||q_i||^2)) q_i` with `q_i = d_i^H U`, which keeps
//! the residual strictly inside the ball. Every returned solution carries the
//! exact duality gap between that primal point and the dual point `U`.

use nalgebra::{DMatrix, DVector};

use crate::error::{DoaError, Result};
use crate::Scalar;

/// Tolerances and limits for [`solve_group_l1`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Residual budget; values below `1e-6 ||Y||_F` are raised to that floor.
    pub beta: f64,
    /// Cap on Newton steps, summed over all barrier stages.
    pub max_iterations: usize,
    /// Relative slack allowed on the residual constraint.
    pub feasibility_tolerance: f64,
    /// Target duality gap, relative to the primal objective.
    pub objective_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            beta: 0.0,
            max_iterations: 3000,
            feasibility_tolerance: 1e-3,
            objective_tolerance: 1e-5,
        }
    }
}

impl SolverConfig {
    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    /// Tight tolerances for small verification problems.
    pub fn precise() -> Self {
        Self {
            feasibility_tolerance: 1e-6,
            objective_tolerance: 1e-7,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(DoaError::InvalidParameter(format!(
                "beta must be >= 0, got {}",
                self.beta
            )));
        }
        if !(self.feasibility_tolerance > 0.0 && self.objective_tolerance > 0.0) {
            return Err(DoaError::InvalidParameter(
                "solver tolerances must be positive".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(DoaError::InvalidParameter(
                "max_iterations must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Solution of the row-sparse program with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSparseSolution<T: Scalar> {
    /// P x K coefficient matrix.
    pub coefficients: DMatrix<T>,
    pub residual_norm: f64,
    /// Sum of row 2-norms.
    pub objective: f64,
    /// Newton steps taken.
    pub iterations: usize,
    pub converged: bool,
    /// Primal objective minus the dual bound; an upper bound on suboptimality.
    pub duality_gap_estimate: f64,
    /// Residual budget actually enforced.
    pub beta: f64,
}

impl<T: Scalar> RowSparseSolution<T> {
    pub fn row_norms(&self) -> Vec<f64> {
        self.coefficients
            .row_iter()
            .map(|r| r.iter().map(|v| v.modulus_squared()).sum::<f64>().sqrt())
            .collect()
    }
}

const BETA_FLOOR: f64 = 1e-6;
const BARRIER_GROWTH: f64 = 10.0;
const CENTERING_TOL: f64 = 1e-8;

/// Solve `min sum_i ||S(i,:)||_2  s.t. ||Y - D S||_F <= beta`.
///
/// Works for real and complex data alike; with real inputs every operation
/// stays in real arithmetic.
pub fn solve_group_l1<T: Scalar>(
    y: &DMatrix<T>,
    d: &DMatrix<T>,
    config: &SolverConfig,
) -> Result<RowSparseSolution<T>> {
    config.validate()?;
    if y.nrows() != d.nrows() {
        return Err(DoaError::DimensionMismatch {
            expected: d.nrows(),
            actual: y.nrows(),
        });
    }
    if d.ncols() == 0 || y.ncols() == 0 || y.nrows() == 0 {
        return Err(DoaError::InvalidParameter(
            "empty dictionary or observation".into(),
        ));
    }
    let p = d.ncols();
    let k = y.ncols();
    let y_norm = y.norm();
    let zero = |beta: f64| RowSparseSolution {
        coefficients: DMatrix::zeros(p, k),
        residual_norm: y_norm,
        objective: 0.0,
        iterations: 0,
        converged: true,
        duality_gap_estimate: 0.0,
        beta,
    };
    if config.beta >= y_norm {
        return Ok(zero(config.beta));
    }

    let floored = config.beta.max(BETA_FLOOR * y_norm);
    let min_residual = distance_to_range(y, d);
    if min_residual > floored * (1.0 + config.feasibility_tolerance) {
        return Err(DoaError::Infeasible {
            min_residual,
            beta: floored,
        });
    }
    let beta = floored.max(min_residual * (1.0 + 0.5 * config.feasibility_tolerance));
    if beta >= y_norm {
        return Ok(zero(beta));
    }
    Ok(solve_with_working_set(y, d, beta, config))
}

/// Dictionaries up to this size are solved in one barrier run.
const FULL_SET_SIZE: usize = 128;
/// Atoms most correlated with Y that seed the working set.
const INITIAL_TOP: usize = 48;
const WARM_SHRINK: f64 = 0.99;
const ARMIJO: f64 = 0.25;
/// Decrease, relative to the Newton decrement, above which a full step is
/// extended; an exact quadratic model predicts one half.
const EXTEND_RATIO: f64 = 0.6;
const MAX_EXTENSION: f64 = 64.0;

/// Constraint generation on the dual: solve over a working set of atoms,
/// rescale the dual point to be feasible for every atom to certify the full
/// problem, and add violated atoms until the certified gap is small.
fn solve_with_working_set<T: Scalar>(
    y: &DMatrix<T>,
    d: &DMatrix<T>,
    beta: f64,
    config: &SolverConfig,
) -> RowSparseSolution<T> {
    let p = d.ncols();
    let k = y.ncols();
    let m = y.nrows();
    let c = realify(y);
    let unconverged = |steps: usize| RowSparseSolution {
        coefficients: DMatrix::zeros(p, k),
        residual_norm: y.norm(),
        objective: 0.0,
        iterations: steps,
        converged: false,
        duality_gap_estimate: f64::INFINITY,
        beta,
    };

    let mut in_set = vec![p <= FULL_SET_SIZE; p];
    let corr = {
        let mut v = vec![0.0; p];
        row_norms_sq(&d.ad_mul(y), &mut v);
        v
    };
    let mut ranked: Vec<usize> = (0..p).collect();
    ranked.sort_by(|&a, &b| corr[b].total_cmp(&corr[a]).then(a.cmp(&b)));
    if p > FULL_SET_SIZE {
        for &i in ranked.iter().take(INITIAL_TOP) {
            in_set[i] = true;
        }
        // A sparse uniform subsample keeps the restricted dual bounded.
        let stride = (p / (2 * m).max(1)).max(1);
        for i in (0..p).step_by(stride) {
            in_set[i] = true;
        }
    }

    let mut steps = 0usize;
    let mut best: Option<RowSparseSolution<T>> = None;
    let mut warm: Option<(DVector<f64>, f64)> = None;
    loop {
        let set: Vec<usize> = (0..p).filter(|&i| in_set[i]).collect();
        let sub = d.select_columns(set.iter());
        if set.len() < p && distance_to_range(y, &sub) > beta {
            let mut added = 0;
            for &i in &ranked {
                if !in_set[i] {
                    in_set[i] = true;
                    added += 1;
                    if added == 2 * m {
                        break;
                    }
                }
            }
            continue;
        }
        let mut barrier = DualBarrier::new(y, &sub, beta);
        let outcome = barrier.run(
            config,
            config.max_iterations.saturating_sub(steps),
            warm.as_ref().map(|(u, g)| (u, *g)),
        );
        steps += barrier.steps;
        let Some(cert) = outcome else {
            return best.unwrap_or_else(|| unconverged(steps));
        };

        // Certify against the whole dictionary.
        let mut q_sq = vec![0.0; p];
        row_norms_sq(&d.ad_mul(&unrealify::<T>(&cert.dual_u, m, k)), &mut q_sq);
        let max_norm = q_sq.iter().cloned().fold(0.0, f64::max).sqrt();
        let dual = (c.dot(&cert.dual_u) - beta * cert.dual_u.norm()) / max_norm.max(1.0);
        let gap = (cert.objective - dual).max(0.0);
        let done = gap <= config.objective_tolerance * cert.objective.max(f64::MIN_POSITIVE);

        let mut coefficients = DMatrix::zeros(p, k);
        for (row, &i) in set.iter().enumerate() {
            coefficients.set_row(i, &cert.coefficients.row(row));
        }
        let candidate = RowSparseSolution {
            coefficients,
            residual_norm: cert.residual,
            objective: cert.objective,
            iterations: steps,
            converged: done,
            duality_gap_estimate: gap,
            beta,
        };
        if best
            .as_ref()
            .is_none_or(|b| candidate.duality_gap_estimate < b.duality_gap_estimate)
        {
            best = Some(candidate);
        }
        if done || steps >= config.max_iterations {
            break;
        }

        let mut violators: Vec<usize> = (0..p).filter(|&i| !in_set[i] && q_sq[i] > 1.0).collect();
        if violators.is_empty() {
            break;
        }
        violators.sort_by(|&a, &b| q_sq[b].total_cmp(&q_sq[a]).then(a.cmp(&b)));
        let take = set.len().max(16);
        for &i in violators.iter().take(take) {
            in_set[i] = true;
        }
        warm = Some((cert.dual_u, gap));
    }
    let mut out = best.unwrap_or_else(|| unconverged(steps));
    out.iterations = steps;
    out
}

/// Distance from Y to the column space of D.
fn distance_to_range<T: Scalar>(y: &DMatrix<T>, d: &DMatrix<T>) -> f64 {
    let (m, p) = d.shape();
    let svd = d.clone().svd(true, false);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    // Rank cutoff at rounding level, so that an atom of D is always in range.
    let tol = max_sv * f64::EPSILON * m.max(p) as f64;
    let mut residual = y.clone();
    for (idx, &sv) in svd.singular_values.iter().enumerate() {
        if sv > tol {
            let col = u.column(idx);
            let coef = col.adjoint() * y;
            residual -= col * coef;
        }
    }
    residual.norm()
}

/// Barrier method on the dual, in a real parameterization `u` of `U`
/// (column-major real parts, then imaginary parts for complex data).
struct DualBarrier<'a, T: Scalar> {
    y: &'a DMatrix<T>,
    d: &'a DMatrix<T>,
    beta: f64,
    m: usize,
    k: usize,
    n: usize,
    c: DVector<f64>,
    u: DVector<f64>,
    /// `D^H U`, P x K.
    q: DMatrix<T>,
    q_sq: Vec<f64>,
    /// Newton step and its image `D^H dU` at the last centered point.
    last_step: Option<(DVector<f64>, DMatrix<T>)>,
    steps: usize,
}

struct Certificate<T: Scalar> {
    coefficients: DMatrix<T>,
    residual: f64,
    objective: f64,
    gap: f64,
    /// Dual point behind `gap`, feasible for the barrier's atoms.
    dual_u: DVector<f64>,
}

impl<'a, T: Scalar> DualBarrier<'a, T> {
    fn new(y: &'a DMatrix<T>, d: &'a DMatrix<T>, beta: f64) -> Self {
        let m = y.nrows();
        let k = y.ncols();
        let parts = if T::IS_COMPLEX { 2 } else { 1 };
        let n = m * k * parts;
        let p = d.ncols();
        Self {
            y,
            d,
            beta,
            m,
            k,
            n,
            c: realify(y),
            u: DVector::zeros(n),
            q: DMatrix::zeros(p, k),
            q_sq: vec![0.0; p],
            last_step: None,
            steps: 0,
        }
    }

    /// Path following until the restricted gap meets the tolerance; returns
    /// the certificate with the smallest gap seen, if any was primal feasible.
    ///
    /// `warm` is a dual point of an earlier restricted problem with its gap
    /// on the full dictionary; it is shrunk into the interior and the path is
    /// joined at the matching barrier parameter.
    fn run(
        &mut self,
        config: &SolverConfig,
        budget: usize,
        warm: Option<(&DVector<f64>, f64)>,
    ) -> Option<Certificate<T>> {
        let p = self.d.ncols();
        let d_max = self
            .d
            .column_iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        // At a central point the gap is about 2 (P + 1) / t. Starting with a
        // gap well above the objective scale keeps the first centering short.
        let scale = self.y.norm() / d_max;
        let mut t = 0.02 * (p + 1) as f64 / scale;
        if let Some((u, gap)) = warm {
            self.u = u.clone();
            self.refresh_q();
            let max_q = self.q_sq.iter().cloned().fold(0.0, f64::max).sqrt();
            self.u *= WARM_SHRINK / max_q.max(1.0);
            if gap > 0.0 && gap.is_finite() {
                t = t.max(2.0 * (p + 1) as f64 / gap);
            }
        }
        let mut best: Option<Certificate<T>> = None;
        loop {
            let stalled = self.center(t, budget);
            let cert = self.certificate(t);
            let feasible = cert.residual <= self.beta * (1.0 + config.feasibility_tolerance);
            let done = feasible
                && cert.gap <= config.objective_tolerance * cert.objective.max(f64::MIN_POSITIVE);
            if feasible && best.as_ref().is_none_or(|b| cert.gap < b.gap) {
                best = Some(cert);
            }
            if done || stalled || self.steps >= budget {
                break;
            }
            t *= BARRIER_GROWTH;
        }
        best
    }

    /// Primal point from the barrier multipliers and its exact gap.
    ///
    /// The multipliers `2 q_i / (t a_i)` are linearized along the last Newton
    /// step: with slacks `a_i` near zero the plain formula amplifies tiny
    /// errors in `U`, while the linearized one satisfies the Newton equations
    /// exactly. The dual point `U + dU` is rescaled to be feasible.
    fn certificate(&self, t: f64) -> Certificate<T> {
        let p = self.d.ncols();
        let mut coefficients = DMatrix::<T>::zeros(p, self.k);
        let mut dual_u = self.u.clone();
        let mut max_q_sq = 0.0f64;
        match &self.last_step {
            Some((step, dq)) => {
                dual_u += step;
                for i in 0..p {
                    let a = 1.0 - self.q_sq[i];
                    let mut lin = 0.0;
                    let mut next_sq = 0.0;
                    for c in 0..self.k {
                        let (qv, dv) = (self.q[(i, c)], dq[(i, c)]);
                        lin += 2.0 * (qv.conjugate() * dv).real();
                        next_sq += (qv + dv).modulus_squared();
                    }
                    max_q_sq = max_q_sq.max(next_sq);
                    let w = 2.0 / (t * a);
                    for c in 0..self.k {
                        let (qv, dv) = (self.q[(i, c)], dq[(i, c)]);
                        coefficients[(i, c)] = (qv + dv + qv.scale(lin / a)).scale(w);
                    }
                }
            }
            None => {
                for i in 0..p {
                    let w = 2.0 / (t * (1.0 - self.q_sq[i]));
                    max_q_sq = max_q_sq.max(self.q_sq[i]);
                    for c in 0..self.k {
                        coefficients[(i, c)] = self.q[(i, c)].scale(w);
                    }
                }
            }
        }
        let objective: f64 = coefficients
            .row_iter()
            .map(|r| r.iter().map(|v| v.modulus_squared()).sum::<f64>().sqrt())
            .sum();
        let residual = (self.y - self.d * &coefficients).norm();
        dual_u /= max_q_sq.sqrt().max(1.0);
        let dual = self.c.dot(&dual_u) - self.beta * dual_u.norm();
        Certificate {
            coefficients,
            residual,
            objective,
            gap: (objective - dual).max(0.0),
            dual_u,
        }
    }

    fn refresh_q(&mut self) {
        let u = unrealify::<T>(&self.u, self.m, self.k);
        self.q = self.d.ad_mul(&u);
        row_norms_sq(&self.q, &mut self.q_sq);
    }

    /// Newton iterations at fixed `t` on
    /// `-t <c, u> + phi(||u||) - sum_i ln(1 - ||q_i||^2)`, where
    /// `phi(rho) = min_s t beta s - ln(s^2 - rho^2)` has the closed form
    /// `1 + r - ln(2 (1 + r) / (t beta)^2)` with `r = sqrt(1 + (t beta rho)^2)`.
    /// Returns true when the line search could make no further progress.
    fn center(&mut self, t: f64, budget: usize) -> bool {
        self.refresh_q();
        self.last_step = None;
        let p = self.d.ncols();
        let (m, k, n) = (self.m, self.k, self.n);
        let tb = t * self.beta;
        loop {
            if self.steps >= budget {
                return false;
            }
            self.steps += 1;
            let a: Vec<f64> = self.q_sq.iter().map(|v| 1.0 - v).collect();
            let w: Vec<f64> = a.iter().map(|a| 2.0 / a).collect();
            let rho_sq = self.u.norm_squared();
            let x = tb * rho_sq.sqrt();
            let root = (1.0 + x * x).sqrt();
            // phi'(rho) / rho and phi''(rho), both scaled by 1 / (t beta)^2.
            let ratio = 1.0 / (1.0 + root);
            let curvature = 1.0 / (root * (1.0 + root));

            let mut wq = self.q.clone();
            for i in 0..p {
                for c in 0..k {
                    wq[(i, c)] = wq[(i, c)].scale(w[i]);
                }
            }
            let grad = realify(&(self.d * &wq)) - &self.c * t + &self.u * (tb * tb * ratio);

            // Hessian: I_K (x) real form of D diag(w) D^H, plus the rank-one
            // term of every atom, plus the curvature of phi.
            let mut h = DMatrix::<f64>::zeros(n, n);
            let mut dw = self.d.clone();
            for (i, mut col) in dw.column_iter_mut().enumerate() {
                col *= T::from_real(w[i]);
            }
            let gram = &dw * self.d.adjoint();
            for blk in 0..k {
                for r in 0..m {
                    for cc in 0..m {
                        let v = gram[(r, cc)];
                        let (xr, xc) = (blk * m + r, blk * m + cc);
                        h[(xr, xc)] += v.real();
                        if T::IS_COMPLEX {
                            let off = m * k;
                            h[(off + xr, off + xc)] += v.real();
                            h[(xr, off + xc)] -= v.imaginary();
                            h[(off + xr, xc)] += v.imaginary();
                        }
                    }
                }
            }
            let mut g = DMatrix::<f64>::zeros(n, p);
            for i in 0..p {
                let di = self.d.column(i);
                let mut col = g.column_mut(i);
                for c in 0..k {
                    let z = wq[(i, c)];
                    for r in 0..m {
                        let v = di[r] * z;
                        col[c * m + r] = v.real();
                        if T::IS_COMPLEX {
                            col[m * k + c * m + r] = v.imaginary();
                        }
                    }
                }
            }
            h += &g * g.transpose();
            for r in 0..n {
                h[(r, r)] += tb * tb * ratio;
            }
            if rho_sq > 0.0 {
                h.ger(
                    tb * tb * (curvature - ratio) / rho_sq,
                    &self.u,
                    &self.u,
                    1.0,
                );
            }

            let step = match solve_spd(h, &grad) {
                Some(s) => -s,
                None => return true,
            };
            let decrement = -grad.dot(&step);
            if !(decrement >= 0.0) {
                return true;
            }
            let dq = self.d.ad_mul(&unrealify::<T>(&step, m, k));
            if 0.5 * decrement <= CENTERING_TOL {
                self.last_step = Some((step, dq));
                return false;
            }

            // Backtracking line search inside the domain. The change of the
            // barrier objective is accumulated term by term so that it stays
            // accurate when the objective itself is large.
            let mut lin = vec![0.0; p];
            let mut quad = vec![0.0; p];
            for c in 0..k {
                for i in 0..p {
                    let (qv, dv) = (self.q[(i, c)], dq[(i, c)]);
                    lin[i] += 2.0 * (qv.conjugate() * dv).real();
                    quad[i] += dv.modulus_squared();
                }
            }
            let linear_rate = -t * self.c.dot(&step);
            let (u_du, du_sq) = (self.u.dot(&step), step.norm_squared());
            // Change of the barrier objective at step length alpha, or None
            // outside the domain.
            let change = |alpha: f64| -> Option<f64> {
                let d_rho_sq = 2.0 * alpha * u_du + alpha * alpha * du_sq;
                let d_x_sq = tb * tb * d_rho_sq;
                let trial_root = (1.0 + x * x + d_x_sq).max(1.0).sqrt();
                let d_root = d_x_sq / (trial_root + root);
                let mut acc = alpha * linear_rate + d_root - (d_root / (1.0 + root)).ln_1p();
                for i in 0..p {
                    let da = -(alpha * lin[i] + alpha * alpha * quad[i]);
                    if !(a[i] + da > 0.0) {
                        return None;
                    }
                    acc -= (da / a[i]).ln_1p();
                }
                Some(acc)
            };
            let mut alpha = 1.0;
            loop {
                match change(alpha) {
                    Some(acc) if acc <= -ARMIJO * alpha * decrement => {
                        // A full step that beats the quadratic model by a
                        // wide margin is followed along the same direction.
                        if alpha == 1.0 && acc < -EXTEND_RATIO * decrement {
                            let mut best = acc;
                            while alpha < MAX_EXTENSION {
                                match change(2.0 * alpha) {
                                    Some(next) if next < best => {
                                        best = next;
                                        alpha *= 2.0;
                                    }
                                    _ => break,
                                }
                            }
                        }
                        break;
                    }
                    _ => {}
                }
                alpha *= 0.5;
                if alpha < 1e-12 {
                    return true;
                }
            }
            self.u += &step * alpha;
            self.q += &dq * T::from_real(alpha);
            row_norms_sq(&self.q, &mut self.q_sq);
        }
    }
}

fn row_norms_sq<T: Scalar>(q: &DMatrix<T>, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for col in q.column_iter() {
        for (o, v) in out.iter_mut().zip(col.iter()) {
            *o += v.modulus_squared();
        }
    }
}

fn realify<T: Scalar>(x: &DMatrix<T>) -> DVector<f64> {
    let len = x.len();
    let parts = if T::IS_COMPLEX { 2 } else { 1 };
    let mut out = DVector::zeros(len * parts);
    for (idx, v) in x.iter().enumerate() {
        out[idx] = v.real();
        if T::IS_COMPLEX {
            out[len + idx] = v.imaginary();
        }
    }
    out
}

fn unrealify<T: Scalar>(u: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<T> {
    let len = rows * cols;
    DMatrix::from_fn(rows, cols, |r, c| {
        let idx = c * rows + r;
        let im = if T::IS_COMPLEX { u[len + idx] } else { 0.0 };
        T::from_parts(u[idx], im)
    })
}

/// Cholesky solve after symmetric diagonal equilibration, with a small
/// diagonal shift if the factorization still fails.
fn solve_spd(mut h: DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let n = h.nrows();
    let scale: Vec<f64> = (0..n)
        .map(|i| {
            let v = h[(i, i)];
            if v > 0.0 && v.is_finite() {
                1.0 / v.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    for c in 0..n {
        for r in 0..n {
            h[(r, c)] *= scale[r] * scale[c];
        }
    }
    let scaled_rhs = DVector::from_fn(n, |i, _| rhs[i] * scale[i]);
    let unscale = |x: DVector<f64>| DVector::from_fn(n, |i, _| x[i] * scale[i]);
    if let Some(ch) = h.clone().cholesky() {
        return Some(unscale(ch.solve(&scaled_rhs)));
    }
    let mut shift = 1e-14;
    for _ in 0..8 {
        let mut shifted = h.clone();
        for i in 0..n {
            shifted[(i, i)] += shift;
        }
        if let Some(ch) = shifted.cholesky() {
            return Some(unscale(ch.solve(&scaled_rhs)));
        }
        shift *= 100.0;
    }
    None
}

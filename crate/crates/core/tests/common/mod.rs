#![allow(dead_code)]

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use uca_doa::C64;

/// Reference solution of the row-sparse program from a generic conic solver.
pub struct ConicSolution {
    pub status: SolverStatus,
    pub coefficients: DMatrix<C64>,
    /// Sum of row norms of `coefficients`, recomputed from the solution.
    pub objective: f64,
    pub residual_norm: f64,
}

/// `min sum_i t_i` over `(S, t)` with `||S(i,:)|| <= t_i` and
/// `||Y - D S||_F <= beta`, written as a second-order cone program.
/// Real inputs are passed with zero imaginary parts and the imaginary
/// unknowns dropped.
pub fn conic_group_l1(
    y: &DMatrix<C64>,
    d: &DMatrix<C64>,
    beta: f64,
    complex: bool,
) -> ConicSolution {
    let (m, p) = d.shape();
    let k = y.ncols();
    let parts = if complex { 2 } else { 1 };
    let nv = parts * p * k + p;
    let sr = |i: usize, c: usize| c * p + i;
    let si = |i: usize, c: usize| p * k + c * p + i;
    let t = |i: usize| parts * p * k + i;
    let (mut ri, mut ci, mut vv) = (Vec::new(), Vec::new(), Vec::new());
    let mut b = Vec::new();
    let mut cones = Vec::new();
    let mut row = 0;
    let mut put = |r: usize, c: usize, v: f64| {
        ri.push(r);
        ci.push(c);
        vv.push(v);
    };
    for i in 0..p {
        put(row, t(i), -1.0);
        b.push(0.0);
        row += 1;
        for c in 0..k {
            put(row, sr(i, c), -1.0);
            b.push(0.0);
            row += 1;
            if complex {
                put(row, si(i, c), -1.0);
                b.push(0.0);
                row += 1;
            }
        }
        cones.push(SupportedConeT::SecondOrderConeT(1 + parts * k));
    }
    b.push(beta);
    row += 1;
    for c in 0..k {
        for r in 0..m {
            for i in 0..p {
                let dv = d[(r, i)];
                put(row, sr(i, c), dv.re);
                if complex {
                    put(row, si(i, c), -dv.im);
                }
            }
            b.push(y[(r, c)].re);
            row += 1;
            if complex {
                for i in 0..p {
                    let dv = d[(r, i)];
                    put(row, si(i, c), dv.re);
                    put(row, sr(i, c), dv.im);
                }
                b.push(y[(r, c)].im);
                row += 1;
            }
        }
    }
    cones.push(SupportedConeT::SecondOrderConeT(1 + parts * m * k));
    let a = CscMatrix::new_from_triplets(row, nv, ri, ci, vv);
    let pm = CscMatrix::new_from_triplets(nv, nv, vec![], vec![], vec![]);
    let mut q = vec![0.0; nv];
    for i in 0..p {
        q[t(i)] = 1.0;
    }
    let settings = DefaultSettings {
        verbose: false,
        tol_gap_abs: 1e-10,
        tol_gap_rel: 1e-10,
        tol_feas: 1e-10,
        max_iter: 500,
        ..DefaultSettings::default()
    };
    let mut solver =
        DefaultSolver::new(&pm, &q, &a, &b, &cones, settings).expect("valid conic program");
    solver.solve();
    let x = &solver.solution.x;
    let s = DMatrix::from_fn(p, k, |i, c| {
        C64::new(x[sr(i, c)], if complex { x[si(i, c)] } else { 0.0 })
    });
    ConicSolution {
        status: solver.solution.status,
        objective: row_norm_sum(&s),
        residual_norm: (y - d * &s).norm(),
        coefficients: s,
    }
}

pub fn row_norm_sum<T: nalgebra::ComplexField<RealField = f64>>(s: &DMatrix<T>) -> f64 {
    s.row_iter().map(|r| r.norm()).sum()
}

/// Distance from `Y` to the column space of `D`, from an SVD of `D`.
pub fn distance_to_range(y: &DMatrix<C64>, d: &DMatrix<C64>) -> f64 {
    let svd = d.clone().svd(true, false);
    let u = svd.u.expect("left vectors");
    let tol = svd.singular_values.max() * 1e-12;
    let mut r = y.clone();
    for (j, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            let uj = u.column(j);
            let coeff = uj.adjoint() * &r;
            r -= uj * coeff;
        }
    }
    r.norm()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// A random instance: sparse coefficients, Gaussian dictionary and noisy
/// observation, with `beta` strictly between the distance to the range of
/// the dictionary and `||Y||`.
pub struct Instance {
    pub y: DMatrix<C64>,
    pub d: DMatrix<C64>,
    pub beta: f64,
    pub complex: bool,
}

impl Instance {
    pub fn random(
        rng: &mut ChaCha8Rng,
        rows: usize,
        atoms: usize,
        k: usize,
        complex: bool,
    ) -> Self {
        let draw = |rng: &mut ChaCha8Rng| {
            let im = if complex { gaussian(rng) } else { 0.0 };
            C64::new(gaussian(rng), im)
        };
        let d = DMatrix::from_fn(rows, atoms, |_, _| draw(rng));
        let mut s = DMatrix::<C64>::zeros(atoms, k);
        let active = rng.random_range(1..=3.min(atoms));
        for _ in 0..active {
            let i = rng.random_range(0..atoms);
            for c in 0..k {
                s[(i, c)] = draw(rng);
            }
        }
        let noise = DMatrix::from_fn(rows, k, |_, _| draw(rng) * 0.1);
        let y = &d * &s + noise;
        let floor = distance_to_range(&y, &d);
        let u: f64 = rng.random_range(0.05..0.6);
        let beta = floor + u * (y.norm() - floor);
        Self {
            y,
            d,
            beta,
            complex,
        }
    }

    pub fn real_parts(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        (self.y.map(|v| v.re), self.d.map(|v| v.re))
    }
}

/// Euclidean projection onto `{S : ||Y - D S||_F <= beta}` for real data.
/// Uses the thin SVD of `D`; the multiplier of the ball constraint is found
/// by bisection.
pub struct BallProjector {
    sigma: Vec<f64>,
    v: DMatrix<f64>,
    yu: DMatrix<f64>,
    y_perp_sq: f64,
    y: DMatrix<f64>,
    d: DMatrix<f64>,
    beta: f64,
}

impl BallProjector {
    pub fn new(y: &DMatrix<f64>, d: &DMatrix<f64>, beta: f64) -> Self {
        let svd = d.clone().svd(true, true);
        let u = svd.u.expect("left vectors");
        let v = svd.v_t.expect("right vectors").transpose();
        let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
        let yu = u.transpose() * y;
        let y_perp_sq = (y.norm_squared() - yu.norm_squared()).max(0.0);
        Self {
            sigma,
            v,
            yu,
            y_perp_sq,
            y: y.clone(),
            d: d.clone(),
            beta,
        }
    }

    pub fn residual(&self, s: &DMatrix<f64>) -> f64 {
        (&self.y - &self.d * s).norm()
    }

    pub fn project(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        if self.residual(z) <= self.beta {
            return z.clone();
        }
        let zv = self.v.transpose() * z;
        let r = self.sigma.len();
        let k = z.ncols();
        let res_at = |lambda: f64| {
            let mut acc = self.y_perp_sq;
            for j in 0..r {
                let s = self.sigma[j];
                let f = 1.0 / (1.0 + lambda * s * s);
                for c in 0..k {
                    let e = (self.yu[(j, c)] - s * zv[(j, c)]) * f;
                    acc += e * e;
                }
            }
            acc.sqrt()
        };
        let mut hi = 1.0;
        while res_at(hi) > self.beta {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if res_at(mid) > self.beta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = hi;
        let mut delta = DMatrix::<f64>::zeros(r, k);
        for j in 0..r {
            let s = self.sigma[j];
            for c in 0..k {
                let sv = (zv[(j, c)] + lambda * s * self.yu[(j, c)]) / (1.0 + lambda * s * s);
                delta[(j, c)] = sv - zv[(j, c)];
            }
        }
        z + &self.v * delta
    }
}

/// Projected subgradient descent with diminishing steps; returns the best
/// objective seen and its iterate. Every iterate is feasible.
pub fn projected_subgradient(
    y: &DMatrix<f64>,
    d: &DMatrix<f64>,
    beta: f64,
    iterations: usize,
) -> (f64, DMatrix<f64>) {
    let proj = BallProjector::new(y, d, beta);
    let pinv = d.clone().pseudo_inverse(1e-12).expect("pseudo inverse");
    let mut s = proj.project(&(pinv * y));
    let mut best = (row_norm_sum(&s), s.clone());
    let (p, k) = s.shape();
    let scale = best.0 / (p as f64).sqrt();
    let mut g = DMatrix::<f64>::zeros(p, k);
    for it in 0..iterations {
        for i in 0..p {
            let n = s.row(i).norm();
            for c in 0..k {
                g[(i, c)] = if n > 0.0 { s[(i, c)] / n } else { 0.0 };
            }
        }
        let step = scale / ((it + 1) as f64).sqrt();
        s = proj.project(&(&s - &g * step));
        let f = row_norm_sum(&s);
        if f < best.0 {
            best = (f, s.clone());
        }
    }
    best
}

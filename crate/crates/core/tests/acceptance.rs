//! Acceptance criteria. Runs as a plain binary (no libtest harness) so that
//! every criterion prints one PASS/FAIL line; the process fails if any
//! criterion fails. Pass criterion numbers as arguments to run a subset.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use clarabel::solver::SolverStatus;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use common::{conic_group_l1, Instance};
use uca_doa::harness::{
    resolution_thresholds, resolution_trial, rmse, run_sweep, trial_data, ExperimentConfig, Method,
    SweepResult, TrialContext,
};
use uca_doa::subspace::{real_subspace_reduce, stack_real_imag};
use uca_doa::{
    build_fr, build_grid, c_l1_svd, rb_l1_svd, signal_subspace_reduce, solve_group_l1,
    synthesize_snapshots, Direction, EstimatorConfig, SolverConfig, SourceScenario, UcaGeometry,
    C64,
};

/// Supremum of `||Im(F_r^H a)|| / ||Re(F_r^H a)||` for N = 13, r = lambda,
/// measured by exact evaluation: the residual grows towards the array plane
/// and peaks at azimuths that are multiples of 360/26 degrees, with
/// elevation 90 - 1e-10 degrees.
const T_IM: f64 = 0.257_744_024_806_147_5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn default_geometry() -> UcaGeometry {
    UcaGeometry::new(13, 1.0).unwrap()
}

fn criterion_1() -> Outcome {
    let t = build_fr(&default_geometry()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let d = Direction::new(rng.random_range(0.0..360.0), rng.random_range(0.0..90.0)).unwrap();
        let (_, r) = t.beamspace_manifold_with_residual(&d);
        worst = worst.max(r);
    }
    Outcome {
        pass: worst <= T_IM,
        detail: format!("max residual {worst:.6} vs T_im {T_IM:.6}"),
    }
}

fn criterion_2() -> Outcome {
    let geometries = [
        (3, 0.2),
        (5, 0.35),
        (7, 0.5),
        (9, 0.7),
        (11, 0.85),
        (13, 1.0),
    ];
    let mut worst: f64 = 0.0;
    let mut orders = Vec::new();
    for (n, r) in geometries {
        let t = build_fr(&UcaGeometry::new(n, r).unwrap()).unwrap();
        orders.push(t.mode_order());
        // F_r^H is M' x N with orthonormal rows, so F_r^H F_r = I_{M'}.
        let f = t.matrix();
        let gram = f * f.adjoint();
        let eye = DMatrix::<C64>::identity(t.beam_count(), t.beam_count());
        worst = worst.max((gram - eye).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let spans = orders == vec![1, 2, 3, 4, 5, 6];
    Outcome {
        pass: spans && worst <= 1e-10,
        detail: format!("mode orders {orders:?}, max |F_r^H F_r - I| {worst:.2e}"),
    }
}

fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn criterion_3() -> Outcome {
    // Pure noise E goes through the RB chain: complex projection V_1, F_r^H,
    // real/imag stacking, real projection V_2. The projections are the ones
    // the pipeline computes for the noiseless default scenario, so they do not
    // depend on E and the law is exactly chi-square with M'K dof.
    // Two coupled variants are reported alongside: projections taken from
    // the noisy data, and projections taken from the pure noise itself.
    let g = default_geometry();
    let t = build_fr(&g).unwrap();
    let k = 3;
    let sources = ExperimentConfig::default().sources;
    let trials = 2000;
    let (mut fixed, mut from_data, mut from_noise) = (vec![], vec![], vec![]);
    for trial in 0..trials as u64 {
        let scenario = SourceScenario::new(sources.clone(), 10.0, 100, 1000 + trial).unwrap();
        let x = synthesize_snapshots(&g, &scenario);
        let clean = synthesize_snapshots(&g, &scenario.clone().noiseless());
        let noise = &x.entries - &clean.entries;
        let scale = 0.5 * x.noise_variance;

        let (v1, v2) = chain_projections(&t, &clean.entries, k);
        let e_sv = stack_real_imag(&t.apply(&(&noise * &v1)).unwrap()) * &v2;
        fixed.push(e_sv.norm_squared() / scale);

        let (v1, v2) = chain_projections(&t, &x.entries, k);
        let e_sv = stack_real_imag(&t.apply(&(&noise * &v1)).unwrap()) * &v2;
        from_data.push(e_sv.norm_squared() / scale);

        let reduced = signal_subspace_reduce(&noise, k).unwrap().matrix;
        let y = real_subspace_reduce(&stack_real_imag(&t.apply(&reduced).unwrap()), k)
            .unwrap()
            .matrix;
        from_noise.push(y.norm_squared() / scale);
    }
    let dof = t.beam_count() * k;
    let chi = ChiSquared::new(dof as f64).unwrap();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let summary = |v: &Vec<f64>| {
        format!(
            "D {:.4} mean {:.2}",
            ks_statistic(v.clone(), |x| chi.cdf(x)),
            mean(v)
        )
    };
    let d = ks_statistic(fixed.clone(), |x| chi.cdf(x));
    Outcome {
        pass: d < 0.05,
        detail: format!(
            "fixed projections D = {d:.4} mean {:.2} vs chi2({dof}); coupled to noisy data {}; coupled to pure noise {}",
            mean(&fixed),
            summary(&from_data),
            summary(&from_noise)
        ),
    }
}

/// The complex and real projections the RB chain derives from `x`,
/// cross-checked against the library reductions.
fn chain_projections(
    t: &uca_doa::BeamspaceTransform,
    x: &DMatrix<C64>,
    k: usize,
) -> (DMatrix<C64>, DMatrix<f64>) {
    let svd = x.clone().svd(false, true);
    let v1 = top_right_vectors(&svd.singular_values, svd.v_t.as_ref().unwrap(), k);
    let reduced = signal_subspace_reduce(x, k).unwrap().matrix;
    assert!((x * &v1 - &reduced).norm() <= 1e-9 * reduced.norm());
    let stacked = stack_real_imag(&t.apply(&reduced).unwrap());
    let svd2 = stacked.clone().svd(false, true);
    let v2 = top_right_vectors(&svd2.singular_values, svd2.v_t.as_ref().unwrap(), k);
    let y = real_subspace_reduce(&stacked, k).unwrap().matrix;
    assert!((&stacked * &v2 - &y).norm() <= 1e-9 * y.norm());
    (v1, v2)
}

fn top_right_vectors<T: nalgebra::ComplexField<RealField = f64>>(
    sv: &nalgebra::DVector<f64>,
    v_t: &DMatrix<T>,
    k: usize,
) -> DMatrix<T> {
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    DMatrix::from_fn(v_t.ncols(), k, |r, c| {
        v_t[(order[c], r)].clone().conjugate()
    })
}

fn criterion_4() -> Outcome {
    let g = default_geometry();
    let grid = Arc::new(build_grid(105.0, 125.0, 30.0, 50.0, 1.0).unwrap());
    assert_eq!(grid.len(), 21 * 21);
    let config = EstimatorConfig {
        refinement: None,
        ..EstimatorConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut rb_ok, mut c_ok) = (0, 0);
    let mut misses = Vec::new();
    for trial in 0..20u64 {
        let truth = grid.points()[rng.random_range(0..grid.len())];
        let scenario = SourceScenario::new(vec![truth], 10.0, 100, 40 + trial)
            .unwrap()
            .noiseless();
        let x = synthesize_snapshots(&g, &scenario);
        let rb = rb_l1_svd(&x, &g, 1, grid.clone(), &config).unwrap();
        let c = c_l1_svd(&x, &g, 1, grid.clone(), &config).unwrap();
        for (name, est, ok) in [("rb", &rb, &mut rb_ok), ("c", &c, &mut c_ok)] {
            if est.directions[0] == truth {
                *ok += 1;
            } else {
                misses.push(format!(
                    "{name} ({}, {}) -> ({}, {})",
                    truth.azimuth_deg(),
                    truth.elevation_deg(),
                    est.directions[0].azimuth_deg(),
                    est.directions[0].elevation_deg()
                ));
            }
        }
    }
    Outcome {
        pass: rb_ok == 20 && c_ok == 20,
        detail: format!("exact RB {rb_ok}/20, C {c_ok}/20 {}", misses.join(", ")),
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_gap: f64 = 0.0;
    let mut infeasible = 0;
    let mut unconverged = 0;
    let mut reference_failures = 0;
    for i in 0..100 {
        let rows = rng.random_range(2..=13);
        let atoms = rng.random_range(rows.max(2)..=25);
        let k = rng.random_range(1..=3);
        let complex = i % 2 == 1;
        let inst = Instance::random(&mut rng, rows, atoms, k, complex);
        let reference = conic_group_l1(&inst.y, &inst.d, inst.beta, complex);
        if reference.status != SolverStatus::Solved {
            reference_failures += 1;
            continue;
        }
        let config = SolverConfig::precise().with_beta(inst.beta);
        let (objective, residual, converged) = if complex {
            let s = solve_group_l1(&inst.y, &inst.d, &config).unwrap();
            (s.objective, s.residual_norm, s.converged)
        } else {
            let (y, d) = inst.real_parts();
            let s = solve_group_l1(&y, &d, &config).unwrap();
            (s.objective, s.residual_norm, s.converged)
        };
        worst_gap = worst_gap.max((objective - reference.objective).abs());
        if residual > inst.beta * (1.0 + config.feasibility_tolerance) {
            infeasible += 1;
        }
        if !converged {
            unconverged += 1;
        }
    }
    Outcome {
        pass: worst_gap <= 1e-4 && infeasible == 0 && unconverged == 0 && reference_failures == 0,
        detail: format!(
            "max |objective - reference| {worst_gap:.2e}, infeasible {infeasible}, unconverged {unconverged}, \
             reference failures {reference_failures} (50 real, 50 complex)"
        ),
    }
}

/// Number of increases in a sequence that should not grow, and whether all
/// of them stay within `slack`.
fn inversions(series: &[f64], relative: bool, slack: f64) -> (usize, bool) {
    let mut count = 0;
    let mut small = true;
    for w in series.windows(2) {
        if w[1] > w[0] {
            count += 1;
            let excess = if relative {
                (w[1] - w[0]) / w[0]
            } else {
                w[1] - w[0]
            };
            small &= excess <= slack;
        }
    }
    (count, small)
}

fn print_rows(result: &SweepResult) {
    for r in &result.rows {
        println!(
            "    {:<9} {:>6.1} dB  az {:>8.4}  el {:>8.4}  p_res {:>6}  {:>8.1} ms  runs {}",
            r.method.name(),
            r.snr_db,
            r.rmse_az_deg,
            r.rmse_el_deg,
            r.resolution_probability
                .map_or("-".into(), |p| format!("{p:.2}")),
            r.mean_wall_time_ms,
            r.n_runs_used
        );
    }
}

fn criterion_6() -> Outcome {
    let config = ExperimentConfig {
        snr_sweep_db: vec![0.0, 5.0, 10.0, 15.0, 20.0],
        n_runs: 50,
        ..ExperimentConfig::default()
    };
    let result = run_sweep(&config).unwrap();
    print_rows(&result);
    let mut trend_ok = true;
    let mut notes = Vec::new();
    for m in Method::ALL {
        let rows = result.series(m);
        for (axis, series) in [
            ("az", rows.iter().map(|r| r.rmse_az_deg).collect::<Vec<_>>()),
            ("el", rows.iter().map(|r| r.rmse_el_deg).collect::<Vec<_>>()),
        ] {
            let (count, small) = inversions(&series, true, 0.10);
            let ok = series.iter().all(|v| v.is_finite()) && (count == 0 || (count == 1 && small));
            if !ok {
                notes.push(format!("{} {axis} not decreasing", m.name()));
            }
            trend_ok &= ok;
        }
    }
    let at0 = |m: Method| result.row(m, 0.0).unwrap();
    let (rb, c, music) = (
        at0(Method::RbL1svd),
        at0(Method::CL1svd),
        at0(Method::RbMusic),
    );
    let slack = 1.05;
    let order_ok = rb.rmse_az_deg <= slack * c.rmse_az_deg
        && rb.rmse_az_deg <= slack * music.rmse_az_deg
        && rb.rmse_el_deg <= slack * c.rmse_el_deg
        && rb.rmse_el_deg <= slack * music.rmse_el_deg;
    if !order_ok {
        notes.push("0 dB ordering violated".into());
    }
    Outcome {
        pass: trend_ok && order_ok,
        detail: format!(
            "(a) trend {}, (b) 0 dB RB {:.3}/{:.3} C {:.3}/{:.3} MUSIC {:.3}/{:.3} {}",
            if trend_ok { "ok" } else { "violated" },
            rb.rmse_az_deg,
            rb.rmse_el_deg,
            c.rmse_az_deg,
            c.rmse_el_deg,
            music.rmse_az_deg,
            music.rmse_el_deg,
            notes.join("; ")
        ),
    }
}

fn criterion_7() -> Outcome {
    let config = ExperimentConfig {
        n_runs: 50,
        methods: vec![Method::RbL1svd],
        ..ExperimentConfig::close_pair()
    };
    let result = run_sweep(&config).unwrap();
    print_rows(&result);
    let p: Vec<f64> = result
        .series(Method::RbL1svd)
        .iter()
        .map(|r| r.resolution_probability.unwrap_or(f64::NAN))
        .collect();
    let decreases: Vec<f64> = p.iter().rev().copied().collect();
    let (count, small) = inversions(&decreases, false, 0.05);
    let trend_ok = p.iter().all(|v| v.is_finite()) && (count == 0 || (count == 1 && small));
    let last = *p.last().unwrap();
    Outcome {
        pass: trend_ok && last >= 0.9,
        detail: format!(
            "P_res {p:?}, trend {}, highest-SNR P_res {last:.2}",
            if trend_ok { "ok" } else { "violated" }
        ),
    }
}

fn criterion_8() -> Outcome {
    let config = ExperimentConfig {
        snr_sweep_db: vec![10.0],
        n_runs: 20,
        ..ExperimentConfig::default()
    };
    let context = TrialContext::new(&config).unwrap();
    let (mut rb_total, mut c_total) = (Duration::ZERO, Duration::ZERO);
    for run in 0..20 {
        let x = trial_data(&config, 0, run).unwrap();
        rb_total += context.run(Method::RbL1svd, &x).unwrap().wall_time;
        c_total += context.run(Method::CL1svd, &x).unwrap().wall_time;
    }
    let rb = rb_total.as_secs_f64() * 1e3 / 20.0;
    let c = c_total.as_secs_f64() * 1e3 / 20.0;
    Outcome {
        pass: rb <= 0.5 * c,
        detail: format!("mean RB {rb:.1} ms, C {c:.1} ms, ratio {:.3}", rb / c),
    }
}

fn criterion_9() -> Outcome {
    let d = |az: f64, el: f64| Direction::new(az, el).unwrap();
    let mut checks = Vec::new();
    // One run, one source: RMSE equals the absolute errors.
    checks.push(rmse(&[vec![d(13.0, 36.0)]], &[d(10.0, 40.0)]).unwrap() == (3.0, 4.0));
    // Azimuth errors wrap across the seam.
    checks.push(rmse(&[vec![d(359.0, 20.0)]], &[d(1.0, 20.0)]).unwrap() == (2.0, 0.0));
    // Two runs of one source: root of the mean square.
    let (az, el) = rmse(&[vec![d(11.0, 20.0)], vec![d(9.0, 23.0)]], &[d(10.0, 20.0)]).unwrap();
    checks.push(az == 1.0 && (el - (4.5f64).sqrt()).abs() < 1e-15);
    // Estimates are paired with the truth before errors are taken.
    checks.push(
        rmse(
            &[vec![d(50.0, 30.0), d(10.0, 20.0)]],
            &[d(10.0, 20.0), d(50.0, 30.0)],
        )
        .unwrap()
            == (0.0, 0.0),
    );
    let pair = ExperimentConfig::close_pair().sources;
    let (thr_az, thr_el) = resolution_thresholds(&pair).unwrap();
    checks.push((thr_az - 2.7).abs() < 1e-12 && (thr_el - 2.55).abs() < 1e-12);
    checks.push(resolution_trial(&[d(200.3 + 2.6, 69.4), d(205.7, 74.5 - 2.5)], &pair).unwrap());
    checks.push(!resolution_trial(&[d(200.3 + 2.8, 69.4), d(205.7, 74.5)], &pair).unwrap());
    checks.push(!resolution_trial(&[d(200.3, 69.4), d(205.7, 74.5 - 2.6)], &pair).unwrap());
    let passed = checks.iter().filter(|&&c| c).count();
    Outcome {
        pass: passed == checks.len(),
        detail: format!(
            "{passed}/{} metric cases, thresholds ({thr_az:.2}, {thr_el:.2})",
            checks.len()
        ),
    }
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome, Duration); 9] = [
        (1, "beamspace realness", criterion_1, Duration::from_secs(1)),
        (
            2,
            "transform orthonormality",
            criterion_2,
            Duration::from_secs(1),
        ),
        (
            3,
            "chi-square noise law",
            criterion_3,
            Duration::from_secs(30),
        ),
        (
            4,
            "noiseless exact recovery",
            criterion_4,
            Duration::from_secs(30),
        ),
        (
            5,
            "solver oracle equivalence",
            criterion_5,
            Duration::from_secs(120),
        ),
        (
            6,
            "RMSE trend and 0 dB ordering",
            criterion_6,
            Duration::from_secs(30 * 60),
        ),
        (
            7,
            "resolution trend",
            criterion_7,
            Duration::from_secs(20 * 60),
        ),
        (
            8,
            "wall time ratio",
            criterion_8,
            Duration::from_secs(10 * 60),
        ),
        (9, "metrics", criterion_9, Duration::from_secs(1)),
    ];
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = Vec::new();
    for (id, name, run, limit) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = outcome.pass && in_time;
        println!(
            "criterion {id} ({name}): {} | {} | {:.2} s (limit {} s){}",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { " over time" }
        );
        if !pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

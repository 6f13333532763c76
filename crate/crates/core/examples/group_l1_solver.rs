use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uca_doa::{solve_group_l1, SolverConfig};

fn main() -> uca_doa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (m, p, k) = (8, 40, 2);
    let d = DMatrix::from_fn(m, p, |_, _| rng.random_range(-1.0..1.0));
    // Two active rows plus a little noise.
    let mut s = DMatrix::zeros(p, k);
    s[(5, 0)] = 1.5;
    s[(5, 1)] = -0.7;
    s[(23, 0)] = 0.4;
    s[(23, 1)] = 1.1;
    let y = &d * &s + DMatrix::from_fn(m, k, |_, _| rng.random_range(-0.01..0.01));

    for beta in [0.05, 0.5, 2.0] {
        let sol = solve_group_l1(&y, &d, &SolverConfig::precise().with_beta(beta))?;
        let active: Vec<usize> = sol
            .row_norms()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 1e-3)
            .map(|(i, _)| i)
            .collect();
        println!(
            "beta {beta:4.2}: objective {:.5} residual {:.5} gap {:.1e} steps {} converged {} active rows {:?}",
            sol.objective, sol.residual_norm, sol.duality_gap_estimate, sol.iterations, sol.converged, active
        );
    }
    Ok(())
}

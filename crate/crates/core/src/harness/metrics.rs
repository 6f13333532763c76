//! Estimate-to-truth pairing, RMSE and the two-source resolution test.

use crate::array_model::Direction;
use crate::error::{DoaError, Result};

/// Largest source count paired by exhaustive enumeration.
pub const ENUMERATION_LIMIT: usize = 6;

/// Azimuth difference wrapped into (-180, 180].
pub fn wrap_azimuth_deg(delta: f64) -> f64 {
    let w = delta.rem_euclid(360.0);
    if w > 180.0 {
        w - 360.0
    } else {
        w
    }
}

fn squared_error(est: &Direction, truth: &Direction) -> f64 {
    let da = wrap_azimuth_deg(est.azimuth_deg() - truth.azimuth_deg());
    let de = est.elevation_deg() - truth.elevation_deg();
    da * da + de * de
}

/// Assignment of estimates to true sources.
#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    /// `permutation[k]` is the index of the estimate paired with truth `k`.
    pub permutation: Vec<usize>,
    /// Total squared angular error of the assignment, in deg^2.
    pub cost: f64,
}

impl Pairing {
    /// Estimates reordered to line up with the truth.
    pub fn apply(&self, estimates: &[Direction]) -> Vec<Direction> {
        self.permutation.iter().map(|&i| estimates[i]).collect()
    }
}

/// Minimum total squared error assignment. Exact enumeration in
/// lexicographic order up to [`ENUMERATION_LIMIT`] sources (the first optimal
/// permutation wins ties), Hungarian method above.
pub fn pair_estimates(estimates: &[Direction], truth: &[Direction]) -> Result<Pairing> {
    if estimates.len() != truth.len() {
        return Err(DoaError::DimensionMismatch {
            expected: truth.len(),
            actual: estimates.len(),
        });
    }
    let k = truth.len();
    let cost: Vec<Vec<f64>> = truth
        .iter()
        .map(|t| estimates.iter().map(|e| squared_error(e, t)).collect())
        .collect();
    let permutation = if k <= ENUMERATION_LIMIT {
        enumerate_best(&cost)
    } else {
        hungarian(&cost)
    };
    let total = permutation
        .iter()
        .enumerate()
        .map(|(t, &e)| cost[t][e])
        .sum();
    Ok(Pairing {
        permutation,
        cost: total,
    })
}

fn enumerate_best(cost: &[Vec<f64>]) -> Vec<usize> {
    let k = cost.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = perm.clone();
    let mut best_cost = f64::INFINITY;
    loop {
        let c: f64 = perm.iter().enumerate().map(|(t, &e)| cost[t][e]).sum();
        if c < best_cost {
            best_cost = c;
            best.clone_from(&perm);
        }
        if !next_permutation(&mut perm) {
            return best;
        }
    }
}

/// Advance to the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n)
        .rev()
        .find(|&j| p[j] > p[i])
        .expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Square assignment by shortest augmenting paths with potentials.
fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    // 1-based arrays, column 0 is the virtual source of each augmentation.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut min_to = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r = owner[col0];
            let mut delta = f64::INFINITY;
            let mut next = 0;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = cost[r - 1][col - 1] - u[r] - v[col];
                if reduced < min_to[col] {
                    min_to[col] = reduced;
                    way[col] = col0;
                }
                if min_to[col] < delta {
                    delta = min_to[col];
                    next = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_to[col] -= delta;
                }
            }
            col0 = next;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for col in 1..=n {
        assignment[owner[col] - 1] = col - 1;
    }
    assignment
}

/// Azimuth and elevation RMSE over paired runs, in degrees.
///
/// Each run is paired to the truth independently; azimuth errors are
/// wrapped. Runs with the wrong number of estimates are rejected.
pub fn rmse(runs: &[Vec<Direction>], truth: &[Direction]) -> Result<(f64, f64)> {
    if runs.is_empty() || truth.is_empty() {
        return Err(DoaError::NoSuccessfulRuns);
    }
    let (mut az, mut el) = (0.0, 0.0);
    for est in runs {
        let paired = pair_estimates(est, truth)?.apply(est);
        for (e, t) in paired.iter().zip(truth) {
            az += wrap_azimuth_deg(e.azimuth_deg() - t.azimuth_deg()).powi(2);
            el += (e.elevation_deg() - t.elevation_deg()).powi(2);
        }
    }
    let n = (runs.len() * truth.len()) as f64;
    Ok(((az / n).sqrt(), (el / n).sqrt()))
}

/// Half the azimuth and elevation separations of a two-source scenario.
pub fn resolution_thresholds(truth: &[Direction]) -> Result<(f64, f64)> {
    if truth.len() != 2 {
        return Err(DoaError::InvalidParameter(format!(
            "resolution needs exactly 2 sources, got {}",
            truth.len()
        )));
    }
    let az = wrap_azimuth_deg(truth[0].azimuth_deg() - truth[1].azimuth_deg()).abs() / 2.0;
    let el = (truth[0].elevation_deg() - truth[1].elevation_deg()).abs() / 2.0;
    Ok((az, el))
}

/// Whether both sources are resolved: after pairing, the largest azimuth
/// error is below half the azimuth separation and likewise in elevation.
pub fn resolution_trial(estimates: &[Direction], truth: &[Direction]) -> Result<bool> {
    let (az_thr, el_thr) = resolution_thresholds(truth)?;
    let paired = pair_estimates(estimates, truth)?.apply(estimates);
    let mut az_err: f64 = 0.0;
    let mut el_err: f64 = 0.0;
    for (e, t) in paired.iter().zip(truth) {
        az_err = az_err.max(wrap_azimuth_deg(e.azimuth_deg() - t.azimuth_deg()).abs());
        el_err = el_err.max((e.elevation_deg() - t.elevation_deg()).abs());
    }
    Ok(az_err < az_thr && el_err < el_thr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(a: f64, e: f64) -> Direction {
        Direction::new(a, e).unwrap()
    }

    #[test]
    fn wrap_convention() {
        assert_eq!(wrap_azimuth_deg(180.0), 180.0);
        assert_eq!(wrap_azimuth_deg(-180.0), 180.0);
        assert_eq!(wrap_azimuth_deg(-358.0), 2.0);
        assert_eq!(wrap_azimuth_deg(190.0), -170.0);
    }

    #[test]
    fn identity_and_swap() {
        let t = [d(10.0, 20.0), d(50.0, 40.0)];
        let p = pair_estimates(&t, &t).unwrap();
        assert_eq!(p.permutation, vec![0, 1]);
        assert_eq!(p.cost, 0.0);
        let swapped = [t[1], t[0]];
        assert_eq!(
            pair_estimates(&swapped, &t).unwrap().permutation,
            vec![1, 0]
        );
    }

    #[test]
    fn ties_take_lexicographically_smallest() {
        // Estimate 0 sits halfway between truths 0 and 1; estimates 1 and 2
        // are far from everything and equidistant from both.
        let t = [d(100.0, 40.0), d(102.0, 40.0), d(200.0, 10.0)];
        let e = [d(101.0, 40.0), d(101.0, 60.0), d(101.0, 20.0)];
        let p = pair_estimates(&e, &t).unwrap();
        let mut best = f64::INFINITY;
        let mut first = vec![];
        let mut perm = vec![0, 1, 2];
        loop {
            let c: f64 = perm
                .iter()
                .enumerate()
                .map(|(k, &i)| squared_error(&e[i], &t[k]))
                .sum();
            if c < best {
                best = c;
                first = perm.clone();
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        assert_eq!(p.permutation, first);
        assert_eq!(p.permutation, vec![0, 1, 2]);
        assert_eq!(p.cost, best);
    }

    #[test]
    fn length_mismatch() {
        assert!(pair_estimates(&[d(1.0, 1.0)], &[d(1.0, 1.0), d(2.0, 2.0)]).is_err());
    }

    #[test]
    fn rmse_single_terms() {
        assert_eq!(
            rmse(&[vec![d(11.0, 22.0)]], &[d(10.0, 20.0)]).unwrap(),
            (1.0, 2.0)
        );
        let (az, el) = rmse(&[vec![d(1.0, 30.0)]], &[d(359.0, 30.0)]).unwrap();
        assert!((az - 2.0).abs() < 1e-12 && el == 0.0);
        let t = [d(100.0, 30.0), d(150.0, 60.0)];
        assert_eq!(rmse(&[t.to_vec(), t.to_vec()], &t).unwrap(), (0.0, 0.0));
        assert!(matches!(rmse(&[], &t), Err(DoaError::NoSuccessfulRuns)));
    }

    #[test]
    fn rmse_of_constant_offset_is_the_offset() {
        let t = [d(120.0, 30.0), d(160.0, 50.0), d(200.0, 70.0)];
        let runs: Vec<Vec<Direction>> = (0..7)
            .map(|_| {
                t.iter()
                    .map(|x| d(x.azimuth_deg() + 0.7, x.elevation_deg() - 0.3))
                    .collect()
            })
            .collect();
        let (az, el) = rmse(&runs, &t).unwrap();
        assert!((az - 0.7).abs() < 1e-9 && (el - 0.3).abs() < 1e-9);
    }

    #[test]
    fn close_pair_thresholds() {
        let t = [d(200.3, 69.4), d(205.7, 74.5)];
        let (az, el) = resolution_thresholds(&t).unwrap();
        assert!((az - 2.7).abs() < 1e-12 && (el - 2.55).abs() < 1e-12);
        assert!(resolution_trial(&t, &t).unwrap());
        let ok = [d(200.3 + 2.6, 69.4), d(205.7, 74.5)];
        assert!(resolution_trial(&ok, &t).unwrap());
        let bad = [d(200.3, 69.4), d(205.7 + 2.8, 74.5)];
        assert!(!resolution_trial(&bad, &t).unwrap());
        assert!(resolution_trial(&t[..1], &t[..1]).is_err());
    }

    fn arb_dirs(k: usize) -> impl Strategy<Value = Vec<Direction>> {
        prop::collection::vec((0.0..360.0f64, 0.0..89.9f64), k)
            .prop_map(|v| v.into_iter().map(|(a, e)| d(a, e)).collect())
    }

    proptest! {
        #[test]
        fn pairing_never_worse_than_identity((e, t) in (1usize..=8).prop_flat_map(|k| (arb_dirs(k), arb_dirs(k)))) {
            let p = pair_estimates(&e, &t).unwrap();
            let identity: f64 = e.iter().zip(&t).map(|(a, b)| squared_error(a, b)).sum();
            prop_assert!(p.cost <= identity + 1e-9);
            let mut sorted = p.permutation.clone();
            sorted.sort();
            prop_assert_eq!(sorted, (0..t.len()).collect::<Vec<_>>());
        }

        #[test]
        fn hungarian_matches_enumeration((e, t) in (1usize..=6).prop_flat_map(|k| (arb_dirs(k), arb_dirs(k)))) {
            let cost: Vec<Vec<f64>> = t.iter().map(|x| e.iter().map(|y| squared_error(y, x)).collect()).collect();
            let a = enumerate_best(&cost);
            let b = hungarian(&cost);
            let ca: f64 = a.iter().enumerate().map(|(k, &i)| cost[k][i]).sum();
            let cb: f64 = b.iter().enumerate().map(|(k, &i)| cost[k][i]).sum();
            prop_assert!((ca - cb).abs() <= 1e-9 * (1.0 + ca));
        }
    }
}

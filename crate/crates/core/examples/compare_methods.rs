use std::sync::Arc;

use uca_doa::harness::pair_estimates;
use uca_doa::{
    build_grid, c_l1_svd, rb_l1_svd, rb_music, synthesize_snapshots, Direction, DoaEstimate,
    EstimatorConfig, SourceScenario, UcaGeometry,
};

fn report(name: &str, est: &DoaEstimate, truth: &[Direction]) -> uca_doa::Result<()> {
    let pairing = pair_estimates(&est.directions, truth)?;
    let matched = pairing.apply(&est.directions);
    print!("{name:>9} {:8.1} ms ", est.wall_time.as_secs_f64() * 1e3);
    for (e, t) in matched.iter().zip(truth) {
        print!(
            " ({:+.2}, {:+.2})",
            e.azimuth_deg() - t.azimuth_deg(),
            e.elevation_deg() - t.elevation_deg()
        );
    }
    println!();
    Ok(())
}

fn main() -> uca_doa::Result<()> {
    let geom = UcaGeometry::new(13, 1.0)?;
    let truth = vec![
        Direction::new(110.1, 35.3)?,
        Direction::new(120.8, 45.0)?,
        Direction::new(170.5, 85.0)?,
    ];
    let snr_db: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.0);
    let x = synthesize_snapshots(&geom, &SourceScenario::new(truth.clone(), snr_db, 100, 3)?);
    let grid = Arc::new(build_grid(90.0, 191.0, 15.0, 89.0, 1.0)?);
    let config = EstimatorConfig::default();

    println!("SNR {snr_db} dB, errors (az, el) in degrees per source");
    report(
        "RB-l1SVD",
        &rb_l1_svd(&x, &geom, 3, grid.clone(), &config)?,
        &truth,
    )?;
    report(
        "C-l1SVD",
        &c_l1_svd(&x, &geom, 3, grid.clone(), &config)?,
        &truth,
    )?;
    report(
        "RB-MUSIC",
        &rb_music(&x, &geom, 3, grid, config.refinement.as_ref())?,
        &truth,
    )?;
    Ok(())
}

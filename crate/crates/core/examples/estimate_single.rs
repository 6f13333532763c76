use std::sync::Arc;

use uca_doa::{
    build_grid, rb_l1_svd, synthesize_snapshots, Direction, EstimatorConfig, SourceScenario,
    UcaGeometry,
};

fn main() -> uca_doa::Result<()> {
    let geom = UcaGeometry::new(13, 1.0)?;
    let truth = vec![
        Direction::new(110.1, 35.3)?,
        Direction::new(120.8, 45.0)?,
        Direction::new(170.5, 85.0)?,
    ];
    let scenario = SourceScenario::new(truth.clone(), 10.0, 100, 7)?;
    let x = synthesize_snapshots(&geom, &scenario);

    let grid = Arc::new(build_grid(90.0, 191.0, 15.0, 89.0, 1.0)?);
    let est = rb_l1_svd(&x, &geom, truth.len(), grid, &EstimatorConfig::default())?;

    println!("RB-l1SVD, 10 dB, {} grid points", est.spectrum.grid.len());
    for d in &truth {
        println!(
            "  true      az {:7.2}  el {:6.2}",
            d.azimuth_deg(),
            d.elevation_deg()
        );
    }
    for d in &est.directions {
        println!(
            "  estimated az {:7.2}  el {:6.2}",
            d.azimuth_deg(),
            d.elevation_deg()
        );
    }
    for s in &est.solves {
        println!(
            "  solve: beta {:.4} residual {:.4} objective {:.4} gap {:.2e} steps {}",
            s.beta, s.residual_norm, s.objective, s.duality_gap_estimate, s.iterations
        );
    }
    println!("  wall time {:.1} ms", est.wall_time.as_secs_f64() * 1e3);
    Ok(())
}

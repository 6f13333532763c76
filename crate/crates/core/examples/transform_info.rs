use uca_doa::harness::transform_info;
use uca_doa::{build_fr, steering_vector, Direction, UcaGeometry};

fn main() -> uca_doa::Result<()> {
    for (n, r) in [(13, 1.0), (9, 0.6), (21, 1.5)] {
        let geom = UcaGeometry::new(n, r)?;
        let info = transform_info(&geom, 2.0)?;
        println!(
            "N {n:2} r/lambda {r:.1}: M {} beams {} orthonormality {:.1e} max imag residual {:.4} at ({}, {})",
            info.mode_order,
            info.beam_count,
            info.orthonormality_error,
            info.max_imag_residual,
            info.worst_direction.azimuth_deg,
            info.worst_direction.elevation_deg
        );
    }

    let geom = UcaGeometry::new(13, 1.0)?;
    let t = build_fr(&geom)?;
    let d = Direction::new(120.8, 45.0)?;
    let b = t.beamspace_vector(&d);
    println!(
        "\nbeamspace vector at (120.8, 45.0), |a| = {:.4}",
        steering_vector(&geom, &d).norm()
    );
    for (i, v) in b.iter().enumerate() {
        println!("  {i:2}: {:+.5} {:+.5}j", v.re, v.im);
    }
    Ok(())
}

use uca_doa::harness::{resolution_thresholds, run_sweep, write_resolve_csv, ExperimentConfig};

fn main() -> uca_doa::Result<()> {
    let config = ExperimentConfig {
        snr_sweep_db: vec![0.0, 10.0, 20.0],
        n_runs: 4,
        ..ExperimentConfig::close_pair()
    };
    let (az, el) = resolution_thresholds(&config.sources)?;
    eprintln!("resolved when every error is below {az:.2} deg azimuth and {el:.2} deg elevation");
    let result = run_sweep(&config)?;
    write_resolve_csv(&result, std::io::stdout().lock())?;
    Ok(())
}

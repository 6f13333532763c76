use uca_doa::harness::{run_sweep, write_sweep_csv, ExperimentConfig};

fn main() -> uca_doa::Result<()> {
    let config = ExperimentConfig {
        snr_sweep_db: vec![0.0, 10.0, 20.0],
        n_runs: 4,
        ..ExperimentConfig::default()
    };
    let result = run_sweep(&config)?;
    write_sweep_csv(&result, std::io::stdout().lock())?;
    for r in &result.rows {
        if r.n_runs_failed > 0 {
            eprintln!(
                "{} at {} dB: {} runs failed",
                r.method, r.snr_db, r.n_runs_failed
            );
        }
    }
    Ok(())
}

//! Command-line front end for the estimators and Monte Carlo sweeps.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::Deserialize;

use uca_doa::harness::{
    output::write_resolve_csv, run_sweep, transform_info, trial_data, write_sweep_csv,
    EstimateJson, ExperimentConfig, GridRegion, Method, TrialContext,
};
use uca_doa::{Direction, DoaError, SnapshotMatrix, UcaGeometry, C64};

#[derive(Parser)]
#[command(
    name = "uca-doa",
    version,
    about = "2-D DOA estimation for uniform circular arrays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate directions from one data set and print JSON.
    Estimate {
        #[command(flatten)]
        common: Overrides,
        /// Estimator to run.
        #[arg(long, default_value = "rb-l1svd")]
        method: String,
        /// Snapshot file (JSON with `real`, `imag` as N x T arrays and
        /// `noise_variance`); synthesized from the config when absent.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Index of the synthesized run within the first SNR of the sweep.
        #[arg(long, default_value_t = 0)]
        run_index: usize,
        /// Include the final spatial spectrum in the output.
        #[arg(long)]
        dump_spectrum: bool,
    },
    /// RMSE against SNR as CSV.
    Sweep {
        #[command(flatten)]
        common: Overrides,
    },
    /// Resolution probability of two sources against SNR as CSV. Without a
    /// config or --sources the closely spaced pair (200.3, 69.4), (205.7, 74.5)
    /// is used.
    Resolve {
        #[command(flatten)]
        common: Overrides,
    },
    /// Print mode order, beamspace size and residual diagnostics as JSON.
    TransformInfo {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n_sensors: Option<usize>,
        #[arg(long)]
        radius_over_wavelength: Option<f64>,
        /// Azimuth/elevation step of the residual scan, degrees.
        #[arg(long, default_value_t = 1.0)]
        sample_step: f64,
    },
}

/// Config file plus flags that override its values.
#[derive(Args)]
struct Overrides {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Sources as `az:el` pairs in degrees, comma separated.
    #[arg(long)]
    sources: Option<String>,
    /// SNR values in dB, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Methods, comma separated: rb-l1svd, c-l1svd, rb-music.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    coarse_step: Option<f64>,
    #[arg(long)]
    fine_step: Option<f64>,
    /// Search region `az_start,az_end,el_start,el_end` in degrees.
    #[arg(long)]
    region: Option<String>,
    /// Search the whole domain.
    #[arg(long)]
    full_grid: bool,
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long)]
    n_sensors: Option<usize>,
    #[arg(long)]
    radius_over_wavelength: Option<f64>,
    /// Noise-free data.
    #[arg(long)]
    noiseless: bool,
    /// Use the bare noise bound as the RB-l1SVD residual budget.
    #[arg(long)]
    no_model_error_allowance: bool,
    /// Report zero wall times so that output is reproducible byte for byte.
    #[arg(long)]
    no_wall_time: bool,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<DoaError> for Failure {
    fn from(e: DoaError) -> Self {
        match e {
            DoaError::Config(m) => Failure::Config(m),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| Failure::Config(format!("{what} '{s}': {e}")))
        })
        .collect()
}

fn parse_sources(text: &str) -> Result<Vec<Direction>, Failure> {
    text.split(',')
        .map(|pair| {
            let (a, e) = pair
                .split_once(':')
                .ok_or_else(|| Failure::Config(format!("source '{pair}' must be az:el")))?;
            let a: f64 = a.trim().parse().map_err(config_err)?;
            let e: f64 = e.trim().parse().map_err(config_err)?;
            Direction::new(a, e).map_err(config_err)
        })
        .collect()
}

fn geometry_override(
    base: UcaGeometry,
    n: Option<usize>,
    r: Option<f64>,
) -> Result<UcaGeometry, Failure> {
    if n.is_none() && r.is_none() {
        return Ok(base);
    }
    UcaGeometry::new(
        n.unwrap_or(base.n_sensors()),
        r.unwrap_or(base.radius_over_wavelength()),
    )
    .map_err(config_err)
}

fn load_config(o: &Overrides, default: ExperimentConfig) -> Result<ExperimentConfig, Failure> {
    let mut c = match &o.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => default,
    };
    if let Some(s) = &o.sources {
        c.sources = parse_sources(s)?;
    }
    if let Some(s) = &o.snr {
        c.snr_sweep_db = parse_list(s, "snr")?;
    }
    if let Some(v) = o.runs {
        c.n_runs = v;
    }
    if let Some(v) = o.snapshots {
        c.n_snapshots = v;
    }
    if let Some(v) = o.seed {
        c.base_seed = v;
    }
    if let Some(s) = &o.methods {
        c.methods = parse_list(s, "method")?;
    }
    if let Some(v) = o.coarse_step {
        c.coarse_step_deg = v;
    }
    if let Some(v) = o.fine_step {
        c.fine_step_deg = v;
    }
    if let Some(s) = &o.region {
        let v: Vec<f64> = parse_list(s, "region bound")?;
        let [az_start, az_end, el_start, el_end] = v[..] else {
            return Err(Failure::Config("region needs four values".into()));
        };
        c.grid_region = Some(GridRegion {
            az_start,
            az_end,
            el_start,
            el_end,
        });
    }
    if o.full_grid {
        c.full_grid = true;
    }
    if let Some(v) = o.confidence {
        c.confidence = v;
    }
    c.geometry = geometry_override(c.geometry, o.n_sensors, o.radius_over_wavelength)?;
    if o.noiseless {
        c.noiseless = true;
    }
    if o.no_model_error_allowance {
        c.model_error_allowance = false;
    }
    if o.no_wall_time {
        c.record_wall_time = false;
    }
    c.validate()?;
    Ok(c)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::Runtime(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotFile {
    real: Vec<Vec<f64>>,
    imag: Vec<Vec<f64>>,
    noise_variance: f64,
}

fn load_snapshots(path: &Path) -> Result<SnapshotMatrix, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let f: SnapshotFile = serde_json::from_str(&text).map_err(config_err)?;
    let n = f.real.len();
    let t = f.real.first().map_or(0, Vec::len);
    if n == 0 || t == 0 || f.imag.len() != n || f.real.iter().chain(&f.imag).any(|r| r.len() != t) {
        return Err(Failure::Config(
            "real and imag must be non-empty N x T arrays of equal shape".into(),
        ));
    }
    let entries = DMatrix::from_fn(n, t, |i, j| C64::new(f.real[i][j], f.imag[i][j]));
    SnapshotMatrix::new(entries, f.noise_variance).map_err(config_err)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Estimate {
            common,
            method,
            data,
            run_index,
            dump_spectrum,
        } => {
            let method: Method = method.parse()?;
            let mut config = load_config(&common, ExperimentConfig::default())?;
            config.methods = vec![method];
            let context = TrialContext::new(&config)?;
            let x = match &data {
                Some(p) => load_snapshots(p)?,
                None => trial_data(&config, 0, run_index)?,
            };
            let est = context.run(method, &x)?;
            let json = EstimateJson::new(&est, dump_spectrum);
            let mut out = output(&common.out)?;
            serde_json::to_writer_pretty(&mut out, &json)
                .map_err(|e| Failure::Runtime(e.to_string()))?;
            writeln!(out).map_err(|e| Failure::Runtime(e.to_string()))?;
            if !json.converged {
                return Err(Failure::Runtime("solver did not converge".into()));
            }
        }
        Command::Sweep { common } => {
            let config = load_config(&common, ExperimentConfig::default())?;
            let result = run_sweep(&config)?;
            write_sweep_csv(&result, output(&common.out)?)?;
            if result.total_runs_used() == 0 {
                return Err(Failure::Runtime("every trial failed".into()));
            }
        }
        Command::Resolve { common } => {
            let config = load_config(&common, ExperimentConfig::close_pair())?;
            if config.n_sources() != 2 {
                return Err(Failure::Config(format!(
                    "resolve needs exactly 2 sources, got {}",
                    config.n_sources()
                )));
            }
            let result = run_sweep(&config)?;
            write_resolve_csv(&result, output(&common.out)?)?;
            if result.total_runs_used() == 0 {
                return Err(Failure::Runtime("every trial failed".into()));
            }
        }
        Command::TransformInfo {
            config,
            n_sensors,
            radius_over_wavelength,
            sample_step,
        } => {
            let base = match &config {
                Some(p) => ExperimentConfig::from_json_file(p)?.geometry,
                None => ExperimentConfig::default().geometry,
            };
            let geom = geometry_override(base, n_sensors, radius_over_wavelength)?;
            if !(sample_step > 0.0 && sample_step <= 90.0) {
                return Err(Failure::Config(format!(
                    "sample step must lie in (0, 90], got {sample_step}"
                )));
            }
            let info = transform_info(&geom, sample_step).map_err(config_err)?;
            let text =
                serde_json::to_string_pretty(&info).map_err(|e| Failure::Runtime(e.to_string()))?;
            println!("{text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

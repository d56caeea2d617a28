use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use otfs_sbl::harness::{emit_csv, sweep, write_csv, RunConfig};
use otfs_sbl::{OtfsError, Result};

/// Monte Carlo NMSE / SER study for OTFS delay-Doppler channel estimation.
///
/// Settings come from the defaults, then the `--config` file, then `--set`
/// pairs, then the dedicated flags. Results are written as CSV to `--out`
/// or to standard output.
#[derive(Debug, Parser)]
#[command(name = "otfs-sim", version)]
struct Args {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// SNR points in dB, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Pilot lengths, comma-separated.
    #[arg(long)]
    np: Option<String>,
    /// Snapshot counts, comma-separated.
    #[arg(long)]
    snapshots: Option<String>,
    /// Fitted mixture orders, comma-separated.
    #[arg(long = "k-model")]
    k_model: Option<String>,
    /// Mixture order of the generated channels.
    #[arg(long = "k-true")]
    k_true: Option<String>,
    /// Estimators: gmm_sbl, sbl, omp, focuss, lasso, oracle_mmse.
    #[arg(long)]
    estimators: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Add a uniform fractional part to every Doppler index.
    #[arg(long = "frac-doppler", num_args = 0..=1, default_missing_value = "true")]
    frac_doppler: Option<String>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<String>,
    /// Any other configuration key, as `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Args {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        for pair in &self.set {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                OtfsError::InvalidConfig(format!("--set expects key=value, got '{pair}'"))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        let flags = [
            ("snr_db", &self.snr),
            ("pilot_len", &self.np),
            ("snapshots", &self.snapshots),
            ("k_model", &self.k_model),
            ("k_true", &self.k_true),
            ("estimators", &self.estimators),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("frac_doppler", &self.frac_doppler),
            ("workers", &self.workers),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(args: &Args) -> Result<()> {
    let cfg = args.config()?;
    let rows = sweep(&cfg)?;
    match &cfg.out {
        Some(path) => {
            emit_csv(&rows, path)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ERROR\t{}\t{}", e.kind(), e);
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use nonherm::config::{Experiment, ExperimentConfig};
use nonherm::experiments::run_to_files;
use nonherm::Error;

const EXIT_TARGET_MISSED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Non-Hermitian qubit experiments: spectrum, P0/Mz dynamics, phase sweep,
/// variational training, concurrence and Bloch trajectories.
#[derive(Parser, Debug)]
#[command(name = "nonherm", version)]
struct Cli {
    /// One of: spectrum_sweep, p0_dynamics, mz_dynamics, mz_phase_sweep,
    /// train, concurrence_dynamics, bloch_trajectory (dashes also accepted).
    experiment: String,
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; overrides the config's output_path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("nonherm: target_cost not reached");
            ExitCode::from(EXIT_TARGET_MISSED)
        }
        Err(e) => {
            eprintln!("nonherm: {e}");
            ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_NUMERICAL })
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, Error> {
    let requested: Experiment = cli.experiment.parse()?;
    let bytes = std::fs::read(&cli.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Error::Config(format!("{} is not UTF-8", cli.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(text)?;
    let base = cli
        .config
        .parent()
        .map(PathBuf::from)
        .unwrap_or_default();
    cfg.rebase_paths(&base);
    let experiment = cfg.resolve_experiment(Some(requested))?;
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_path.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", experiment.name())));
    let result = run_to_files(experiment, &cfg, &bytes, seed, &out)?;
    Ok(result.target_reached.unwrap_or(true))
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gkls::experiments::{run, Experiment, ExperimentConfig, Overrides, RunError};

/// Run a driven open-system experiment from a TOML config.
#[derive(Parser, Debug)]
#[command(name = "gkls", version)]
struct Cli {
    /// fig2, jc-sim, eigenops, attractor, coefficients or touchard
    experiment: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated coherent amplitudes
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, RunError> {
    let experiment = Experiment::parse(&cli.experiment)
        .ok_or_else(|| RunError::Config(format!("unknown experiment `{}`", cli.experiment)))?;
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if cfg.experiment != experiment {
        return Err(RunError::Config(format!(
            "config is for `{}` but `{}` was requested",
            cfg.experiment, experiment
        )));
    }
    cfg.apply(&Overrides { out: cli.out.clone(), alpha: cli.alpha.clone(), tmax: cli.tmax, steps: cli.steps })?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match load(&cli).and_then(|cfg| run(&cfg)) {
        Ok(out) => {
            for f in &out.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gkls: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

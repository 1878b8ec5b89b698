//! `randmeas`: experiment runner for randomized-measurement concurrence estimation.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error, 3 validation failure.

mod commands;
mod config;
mod rows;

use anyhow::Result;
use clap::{Parser, Subcommand};
use commands::RunContext;
use config::{resolve_seed, ConfigError, ExperimentConfig, Format, SEED_ENV};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "randmeas",
    version,
    about = "Multiparticle concurrence from simulated randomized measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the environment variable and the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores). Output does not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Adds a wall-clock column to result rows.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Cheapest (M, K) per N meeting a relative error target.
    Plan,
    /// Simulated protocol runs with concurrence or mixed-bound estimates.
    Estimate,
    /// Exact moments and reference values.
    Exact,
    /// Analytic variances, optionally against Monte Carlo.
    Variance,
    /// Random circuit ensembles with exact and estimated values per circuit.
    CircuitEnsemble,
    /// Self-check suites; exits with 3 on failure.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Plan => "plan",
            Command::Estimate => "estimate",
            Command::Exact => "exact",
            Command::Variance => "variance",
            Command::CircuitEnsemble => "circuit-ensemble",
            Command::Validate => "validate",
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(c) = &config.command {
        if c != cli.command.name() {
            return Err(ConfigError(format!(
                "config is for `{c}` but `{}` was requested",
                cli.command.name()
            ))
            .into());
        }
    }
    let env_seed = std::env::var(SEED_ENV).ok();
    let seed = resolve_seed(cli.seed, env_seed.as_deref(), config.seed)?;
    if let Some(w) = cli.workers.or(config.workers) {
        if w == 0 {
            return Err(ConfigError("workers must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().ok();
    }
    let out = cli.out.clone().or_else(|| config.output.path.clone());
    let format = cli
        .format
        .or(config.output.format)
        .or_else(|| {
            out.as_ref()
                .filter(|p| p.extension().is_some_and(|e| e == "json"))
                .map(|_| Format::Json)
        })
        .unwrap_or(Format::Csv);
    let timing = cli.timing || config.output.timing.unwrap_or(false);
    let ctx = RunContext { config, seed, timing };
    log::info!("{} with seed {:?}", cli.command.name(), seed);

    let mut buf = Vec::new();
    let mut failed = false;
    match cli.command {
        Command::Plan => rows::write_rows(&commands::plan(&ctx)?, format, &mut buf)?,
        Command::Estimate => rows::write_rows(&commands::estimate(&ctx)?, format, &mut buf)?,
        Command::Exact => rows::write_rows(&commands::exact(&ctx)?, format, &mut buf)?,
        Command::Variance => rows::write_rows(&commands::variance(&ctx)?, format, &mut buf)?,
        Command::CircuitEnsemble => rows::write_rows(&commands::circuit_ensemble(&ctx)?, format, &mut buf)?,
        Command::Validate => {
            let (report, passed) = commands::validate(&ctx)?;
            rows::write_rows(&report, format, &mut buf)?;
            failed = !passed;
        }
    }
    match &out {
        Some(path) => std::fs::write(path, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    if failed {
        return Err(anyhow::Error::msg("validation failed").context(ValidationMarker));
    }
    Ok(())
}

#[derive(Debug)]
struct ValidationMarker;

impl std::fmt::Display for ValidationMarker {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("validation failed")
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<ValidationMarker>().is_some() => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
        Err(e) if e.chain().any(|c| c.downcast_ref::<ConfigError>().is_some()) => {
            eprintln!("{e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Overrides;
use crate::error::CliError;

/// Ground-state estimation experiments with a Gaussian spectral filter.
#[derive(Parser)]
#[command(name = "qgf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grid scan over (μ, 1/σ²) on one overlap table
    Scan(RunArgs),
    /// Scan at each cutoff of `filter.schedule`, extending the table
    Iterate(RunArgs),
    /// Noiseless, noisy and extrapolated error curves for both channels
    Noise(RunArgs),
    /// Qumode-assisted filter over a shift schedule
    Cv(RunArgs),
    /// Filter response samples against the target Gaussian
    FilterResponse(RunArgs),
    /// Shot and gate budget estimates
    Budget(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment configuration (JSON)
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, cmd): (&RunArgs, fn(config::ExperimentConfig) -> Result<(), CliError>) = match &cli.command {
        Command::Scan(a) => (a, commands::scan),
        Command::Iterate(a) => (a, commands::iterate),
        Command::Noise(a) => (a, commands::noise),
        Command::Cv(a) => (a, commands::cv),
        Command::FilterResponse(a) => (a, commands::filter_response),
        Command::Budget(a) => (a, commands::budget),
    };
    let mut cfg = config::load(&args.config)?;
    cfg.apply(&args.overrides)?;
    cfg.validate()?;
    cmd(cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qgf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

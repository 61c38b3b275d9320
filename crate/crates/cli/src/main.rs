//! `cascade`: run master-equation and trajectory experiments from JSON
//! configs, or run the built-in verification suite.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;

/// Environment variable holding the worker-thread count for trajectory
/// ensembles.
pub const WORKERS_ENV: &str = "CASCADE_WORKERS";

#[derive(Parser)]
#[command(name = "cascade", version, about = "Cascaded source-to-qubit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the master equation and write observables and the final state.
    RunMaster { config: PathBuf },
    /// Run trajectories and write records, per-trajectory series and the ensemble average.
    RunTrajectories { config: PathBuf },
    /// Run acceptance criteria and write a verdict file.
    Verify {
        /// `all` or a criterion id (A1..A9).
        #[arg(long, default_value = "all")]
        suite: String,
        /// Directory for verdicts.json.
        #[arg(long, default_value = "verification")]
        out: PathBuf,
    },
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Run(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = configure_workers().and_then(|()| match &cli.command {
        Command::RunMaster { config } => commands::run_master(config),
        Command::RunTrajectories { config } => commands::run_trajectories(config),
        Command::Verify { suite, out } => commands::verify(suite, out),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cascade: {e}");
            e.exit_code()
        }
    }
}

//! `polybne`: solve, study and cross-check polynomial-rule equilibria of
//! Bayesian games from JSON experiment configs.

mod commands;
mod config;
mod output;
mod plugins;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use commands::Outcome;

#[derive(Parser)]
#[command(
    name = "polybne",
    version,
    about = "Polynomial decision-rule equilibria of Bayesian games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Overrides the config's output directory.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration; writes result.json and curves.csv.
    Solve { config: PathBuf },
    /// Run a degree or sample-size study; writes study.json and one curve
    /// table per level.
    Study { config: PathBuf },
    /// Brute-force table equilibria and compare with the solver; writes
    /// oracle.json.
    Oracle { config: PathBuf },
    /// Quantize the type distribution; writes quantize.json.
    Quantize { config: PathBuf },
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            anyhow::bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let (path, cmd): (&PathBuf, fn(&config::ExperimentConfig) -> anyhow::Result<Outcome>) = match &cli.command {
        Command::Solve { config } => (config, commands::solve),
        Command::Study { config } => (config, commands::study),
        Command::Oracle { config } => (config, commands::oracle),
        Command::Quantize { config } => (config, commands::quantize),
    };
    let cfg = commands::load(path, cli.output_dir.as_deref(), cli.seed)?;
    cmd(&cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(Outcome::Converged)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::NotConverged)) => ExitCode::from(2),
        Ok(Err(e)) => {
            error!("{e:#}");
            ExitCode::from(1)
        }
        Err(_) => {
            error!("internal error");
            ExitCode::from(1)
        }
    }
}

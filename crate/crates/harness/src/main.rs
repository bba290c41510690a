//! Batch CLI for the distance-rate laboratory.
//!
//! Each subcommand runs one scenario from a JSON config (or its built-in
//! default) and writes deterministic CSV/JSON artifacts. Exit codes:
//! 0 success, 1 assertion failure, 2 config error, 3 budget exceeded,
//! 4 quadrature failure.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use cltlab::config::{ConfigError, ExperimentConfig, Scenario};
use cltlab::scenario;

#[derive(Parser)]
#[command(
    name = "cltlab",
    version,
    about = "Kolmogorov-distance rate experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (JSON); the scenario's built-in default otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = library default).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Atom budget override for exact enumeration.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Distance-versus-n sweep with a log-log rate fit.
    Rate(CommonArgs),
    /// Lattice-condition certificates (fixed level or bisected minimum).
    Certify(CommonArgs),
    /// Exact distance versus smoothing bound versus the classical curve.
    Esseen(CommonArgs),
    /// Tail curves of the direction statistics over random directions.
    SphereTails(CommonArgs),
    /// Theorem-oracle suite; one pass/fail line per check.
    CheckLemmas(CommonArgs),
}

impl Command {
    fn scenario(&self) -> Scenario {
        match self {
            Command::Rate(_) => Scenario::Rate,
            Command::Certify(_) => Scenario::Certify,
            Command::Esseen(_) => Scenario::Esseen,
            Command::SphereTails(_) => Scenario::SphereTails,
            Command::CheckLemmas(_) => Scenario::CheckLemmas,
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Rate(a)
            | Command::Certify(a)
            | Command::Esseen(a)
            | Command::SphereTails(a)
            | Command::CheckLemmas(a) => a,
        }
    }
}

fn build_config(scenario: Scenario, args: &CommonArgs) -> Result<ExperimentConfig, ConfigError> {
    let mut config = match &args.config {
        Some(path) => {
            let c = ExperimentConfig::load(path)?;
            if c.scenario != scenario {
                return Err(ConfigError::Invalid(format!(
                    "config is for scenario \"{}\", subcommand is \"{}\"",
                    c.scenario.name(),
                    scenario.name()
                )));
            }
            c
        }
        None => ExperimentConfig::default_for(scenario),
    };
    if let Some(out) = &args.out {
        config.out = out.clone();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(budget) = args.budget {
        config.budget = budget;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = cli.command.args();

    let config = match build_config(cli.command.scenario(), args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            return ExitCode::from(2);
        }
    };

    match pool.install(|| scenario::run(&config)) {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            for file in &summary.files {
                println!("wrote {}", file.display());
            }
            println!("ok");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

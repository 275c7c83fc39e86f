// `!(x > 0)` is the idiom used to reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod experiment;
mod figures;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{ExperimentConfig, Kind};
use crate::error::CliError;
use crate::figures::Figure;
use crate::validate::Suite;

/// Alternating random walks with resets: experiments, figures and
/// validation suites.
#[derive(Parser)]
#[command(name = "resetwalk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML file.
    Run { config: PathBuf },
    /// Run an invariant battery and print one line per check.
    Validate {
        /// transforms, closed-forms, mc-vs-analytic, inversion or optimize.
        suite: Suite,
        /// Paths per point for mc-vs-analytic; below 100000 the bands widen
        /// to 5 stderr.
        #[arg(long, default_value_t = 1_000_000)]
        paths: u64,
    },
    /// Write the CSV curves of a preset figure.
    Figure {
        /// fig2, fig4 or fig6.
        name: Figure,
        #[arg(long, default_value_t = 1_000_000)]
        paths: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

/// Sizes the global worker pool from `RESETWALK_THREADS` (0 or unset means
/// one worker per core).
fn configure_threads() -> Result<(), CliError> {
    let threads = match std::env::var("RESETWALK_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("RESETWALK_THREADS must be a nonnegative integer, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))
}

fn figure_config(name: Figure, paths: u64, seed: u64, out: PathBuf) -> Result<ExperimentConfig, CliError> {
    if paths == 0 {
        return Err(CliError::Config("--paths must be at least 1".into()));
    }
    let preset = name.preset();
    Ok(ExperimentConfig {
        kind: Kind::Figure(name),
        model: preset.model,
        level: preset.level,
        reset_rates: preset.reset_rates,
        rhos: preset.rhos,
        times: Vec::new(),
        omegas: Vec::new(),
        n_paths: paths,
        seed,
        output: out,
        bins: (0.0, 0.0, 0),
        snapshot_time: None,
    })
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Run { config } => {
            let name = config.display().to_string();
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Config(format!("{name}: cannot read config: {e}")))?;
            let cfg = config::parse(&name, &text)?;
            experiment::run(&cfg)
        }
        Command::Validate { suite, paths } => {
            if paths == 0 {
                return Err(CliError::Config("--paths must be at least 1".into()));
            }
            validate::run(suite, paths)
        }
        Command::Figure { name, paths, seed, out } => experiment::run(&figure_config(name, paths, seed, out)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

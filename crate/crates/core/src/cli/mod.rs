//! The `rebal` command-line front end.
//!
//! Every subcommand reads an optional JSON config (`--config`), applies the
//! flag overrides on top, and writes CSV or JSON to `--out` or stdout.
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{Error, Result};
use config::PlanConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "rebal", version, about = "Plan and cost weight-interpolation trajectories for G3M pools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Start weights, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub w_start: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub w_end: Option<Vec<f64>>,
    /// Number of steps.
    #[arg(long)]
    pub f: Option<usize>,
    /// Bisection depth (`f = 2^depth`).
    #[arg(long)]
    pub depth: Option<u32>,
    /// Interpolation method(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub method: Option<Vec<String>>,
    /// Loss kernel: exact_kl, quadratic or pade.
    #[arg(long)]
    pub kernel: Option<String>,
    /// Volatilities, comma separated. A single value with more than one
    /// token makes the first asset the only volatile one.
    #[arg(long, value_delimiter = ',')]
    pub sigma: Option<Vec<f64>>,
    /// annual or daily.
    #[arg(long)]
    pub sigma_units: Option<String>,
    /// Fee retention, e.g. 0.997.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Cost-of-carry fraction of zero-fee LVR.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the f + 1 weight vectors of a trajectory.
    Plan(CommonArgs),
    /// Per-method loss table.
    Cost {
        #[command(flatten)]
        args: CommonArgs,
        /// CSV of per-step losses instead of the summary table.
        #[arg(long)]
        per_step: bool,
    },
    /// Optimal step count, fee threshold and related scales.
    Steps(CommonArgs),
    /// Monte-Carlo cost over a grid of step counts.
    Simulate(CommonArgs),
    /// Brute-force trajectory optimisation starting from SLERP.
    Optimize(CommonArgs),
    /// Two-token pendulum boundary-value problem.
    Pendulum(CommonArgs),
    /// Replay a trajectory on a price CSV.
    Replay {
        #[command(flatten)]
        args: CommonArgs,
        /// Price CSV (`block,p0,p1,...`).
        prices: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    if e.is_numeric() {
        3
    } else {
        2
    }
}

fn dispatch(cmd: &Command) -> Result<(commands::Rendered, Option<PathBuf>)> {
    let (args, run): (&CommonArgs, Box<dyn Fn(&PlanConfig) -> Result<commands::Rendered>>) = match cmd {
        Command::Plan(a) => (a, Box::new(commands::plan)),
        Command::Cost { args, per_step } => {
            let p = *per_step;
            (args, Box::new(move |c| commands::cost(c, p)))
        }
        Command::Steps(a) => (a, Box::new(commands::steps)),
        Command::Simulate(a) => (a, Box::new(commands::simulate)),
        Command::Optimize(a) => (a, Box::new(commands::optimize)),
        Command::Pendulum(a) => (a, Box::new(commands::pendulum)),
        Command::Replay { args, prices } => {
            let p = prices.clone();
            (args, Box::new(move |c| commands::replay(c, &p)))
        }
    };
    let config = PlanConfig::resolve(args)?;
    let rendered = run(&config)?;
    Ok((rendered, config.out.clone()))
}

/// Run a parsed command line, returning the process exit code.
pub fn run(cli: &Cli) -> u8 {
    match dispatch(&cli.command) {
        Ok((r, out)) => {
            let written = output::sink(out.as_deref()).and_then(|mut w| {
                w.write_all(r.body.as_bytes())?;
                w.flush()?;
                Ok(())
            });
            if let Err(e) = written {
                eprintln!("error: {e}");
                return exit_code(&e);
            }
            let _ = commands::write_notes(&mut std::io::stderr(), &r.notes);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    ExitCode::from(run(&cli))
}

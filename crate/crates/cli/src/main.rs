//! `qpco`: scan campaigns over the quasi-periodic Schrödinger cocycle.
//!
//! Exit codes: 0 success, 2 configuration/output errors, 3 numerical
//! errors (reported with module and stage), 4 exhausted resource budgets.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::output::Sink;

#[derive(Parser)]
#[command(
    name = "qpco",
    version,
    about = "Quasi-periodic cocycle scan campaigns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML campaign file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads (overrides `run.workers`; 0 = automatic).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Seed for randomized sampling (overrides `run.seed`).
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Override any config key, e.g. `--set model.K=2` or `--set lyapunov.n=10000`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, Subcommand)]
enum Command {
    /// Lyapunov exponent along an energy grid.
    ScanLyapunov,
    /// Finite-volume eigenvalues, decay fits, edges and gaps.
    Spectrum,
    /// Reducing conjugacy at E = 0 and the near-bottom probe.
    Reduce,
    /// Gordon criterion and approximant probes.
    GordonProbe,
    /// Continued-fraction data, β proxy and Diophantine checks for ω.
    ClassifyFreq,
    /// Lyapunov exponent over a (K, E) grid.
    PhaseDiagram,
}

type Runner = fn(&config::CampaignConfig, &mut Sink) -> Result<(), CliError>;

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = config::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(out) = cli.out {
        cfg.output.dir = out;
    }
    if let Some(w) = cli.workers {
        cfg.run.workers = w;
    }
    if let Some(s) = cli.seed {
        cfg.run.seed = s;
    }
    if cfg.run.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.run.workers)
            .build_global()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    }
    let (name, cmd): (&'static str, Runner) = match cli.command {
        Command::ScanLyapunov => ("scan-lyapunov", commands::scan_lyapunov),
        Command::Spectrum => ("spectrum", commands::spectrum),
        Command::Reduce => ("reduce", commands::reduce),
        Command::GordonProbe => ("gordon-probe", commands::gordon_probe),
        Command::ClassifyFreq => ("classify-freq", commands::classify_freq),
        Command::PhaseDiagram => ("phase-diagram", commands::phase_diagram),
    };
    let mut sink = Sink::new(name, &cfg)?;
    cmd(&cfg, &mut sink)?;
    Ok(sink.written().to_vec())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qpco: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

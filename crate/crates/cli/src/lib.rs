//! Batch entry point: configure, run, and report the verification pipelines.
//!
//! `conecap <solve|eigen|verify|sweep> --config <path> [--output <dir>]`
//! reads a JSON configuration, runs the requested pipeline per resolution,
//! and writes `report.json`, per-resolution trace CSVs, and mesh exports to
//! the output directory. `verify` additionally prints one PASS/FAIL line per
//! gate and exits nonzero if any fails. The only environment variable read
//! is `CONECAP_THREADS` (study parallelism, default 1).

pub mod config;
pub mod report;
pub mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Command;
use runner::execute;

#[derive(Parser)]
#[command(
    name = "conecap",
    version,
    about = "Mixed boundary-value verification runs on cone sectors in constant-curvature surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the forced problem per resolution: fields, traces, reports.
    Solve(RunArgs),
    /// Smallest mixed eigenpair per resolution plus the boundary identity.
    Eigen(RunArgs),
    /// Full verification with pass/fail gate lines (needs a resolution ladder).
    Verify(RunArgs),
    /// Convergence study: observed orders across the ladder.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output_dir from the config).
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match &cli.command {
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Eigen(a) => (Command::Eigen, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    match execute(cmd, &args.config, args.output.as_deref()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

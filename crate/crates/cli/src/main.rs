//! `pushwass`: convergence sweeps, bound audits and histogram comparisons for
//! pushforward measures of surrogate models.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use pushwass::experiments::{load_config, run_command, Command, RunOptions};
use pushwass::Execution;

#[derive(Parser)]
#[command(name = "pushwass", version, about = "Wasserstein distances between pushforwards of exact and surrogate response functions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep a surrogate over node counts and fit convergence rates.
    Converge(Common),
    /// Evaluate every upper and lower bound for one (f, g) pair.
    Bounds(Common),
    /// Compare the spline pipeline with histogram density estimation.
    ///
    /// Histograms use N equal-width bins on [min sample, max sample]; every
    /// bin is half-open except the last, which is closed.
    CompareHist(Common),
    /// Harmonic oscillator f(v) = v^2 on U[1, 2] with piecewise linear surrogates.
    DemoOscillator(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: the config's output_dir, else ./results).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Reference midpoint cells per axis; overrides the config.
    #[arg(long)]
    ref_resolution: Option<usize>,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (command, common) = match cli.command {
        Cmd::Converge(c) => (Command::Converge, c),
        Cmd::Bounds(c) => (Command::Bounds, c),
        Cmd::CompareHist(c) => (Command::CompareHist, c),
        Cmd::DemoOscillator(c) => (Command::DemoOscillator, c),
    };
    let config = load_config(common.config.as_deref()).context("loading config")?;
    let opts = RunOptions {
        out: common.out,
        seed: common.seed,
        ref_resolution: common.ref_resolution,
        exec: if common.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    let report = run_command(command, &config, &opts)?;
    for line in &report.lines {
        println!("{line}");
    }
    for file in &report.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

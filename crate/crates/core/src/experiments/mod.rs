//! Experiment drivers behind the command-line tool: convergence sweeps, bound
//! audits, histogram comparisons and the oscillator demo. Every command is a
//! pure function of its config and seed, and writes its artifacts under one
//! output directory.

pub mod audit;
pub mod config;
pub mod convergence;
pub mod demo;
pub mod expr;
pub mod histogram;
pub mod output;
pub mod problems;
pub mod rates;
pub mod suites;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::exec::Execution;
use audit::audit_bounds;
use config::{BoundsSpec, ExperimentConfig, HistogramSpec, Metric, ProblemName, ProblemSpec, SurrogateKind, SurrogateSpec};
use convergence::{run_convergence, ConvergenceRun, ResolutionCheck, SweepOptions};
use output::{emit_outputs, ensure_dir, format_float, write_csv, write_json, FitOutcome};
use problems::Problem;
use rates::RateModel;

/// Directory used when neither the command line nor the config names one.
pub const DEFAULT_OUTPUT_DIR: &str = "results";
pub const BOUNDS_CSV: &str = "bounds.csv";
pub const BOUNDS_JSON: &str = "bounds.json";

/// Command-line overrides; each takes precedence over the config.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub ref_resolution: Option<usize>,
    pub exec: Execution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Converge,
    Bounds,
    CompareHist,
    DemoOscillator,
}

/// Files written and lines to show the user.
#[derive(Clone, Debug, Default)]
pub struct CommandReport {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

struct Resolved {
    problem: Problem,
    surrogate: SurrogateSpec,
    m: usize,
    seed: u64,
    out: PathBuf,
}

fn resolve(config: &ExperimentConfig, opts: &RunOptions, default_problem: ProblemName, default_kind: SurrogateKind) -> Result<Resolved> {
    let spec = config.problem.clone().unwrap_or_else(|| ProblemSpec::named(default_problem));
    let problem = Problem::from_spec(&spec)?;
    let surrogate = config.surrogate.clone().unwrap_or_else(|| SurrogateSpec::of(default_kind));
    surrogate.sweep()?;
    let m = opts.ref_resolution.or(config.ref_resolution).unwrap_or_else(|| problem.default_resolution());
    if m == 0 {
        return Err(crate::Error::Config("reference resolution must be positive".into()));
    }
    let seed = opts.seed.unwrap_or_else(|| config.seed());
    let out = opts.out.clone().or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    Ok(Resolved { problem, surrogate, m, seed, out })
}

fn kind_name(kind: SurrogateKind) -> String {
    serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

#[derive(Serialize)]
struct FailureNote {
    n: usize,
    message: String,
}

#[derive(Serialize)]
struct RatesDocument<'a> {
    command: &'static str,
    problem: &'a str,
    surrogate: String,
    reference_resolution: usize,
    seed: u64,
    sweep: Vec<usize>,
    columns: &'a [String],
    fits: &'a BTreeMap<String, Vec<FitOutcome>>,
    resolution_checks: &'a [ResolutionCheck],
    failures: Vec<FailureNote>,
}

/// Dispatch one subcommand.
pub fn run_command(command: Command, config: &ExperimentConfig, opts: &RunOptions) -> Result<CommandReport> {
    match command {
        Command::Converge => run_converge(config, opts),
        Command::Bounds => run_bounds(config, opts),
        Command::CompareHist => run_compare_hist(config, opts),
        Command::DemoOscillator => run_demo_oscillator(config, opts),
    }
}

fn fits_for(run: &ConvergenceRun, columns: &[String]) -> BTreeMap<String, Vec<FitOutcome>> {
    columns
        .iter()
        .enumerate()
        .map(|(j, col)| {
            let (ns, errs) = run.series(j);
            let fits = [RateModel::Power, RateModel::Exponential].iter().map(|&m| FitOutcome::compute(&ns, &errs, m)).collect();
            (col.clone(), fits)
        })
        .collect()
}

fn sweep_outputs(command: &'static str, r: &Resolved, run: &ConvergenceRun) -> Result<CommandReport> {
    let columns: Vec<String> = run.metrics.iter().map(Metric::to_string).collect();
    let fits = fits_for(run, &columns);
    let failures: Vec<FailureNote> =
        run.records.iter().filter_map(|rec| rec.failure.as_ref().map(|m| FailureNote { n: rec.n, message: m.clone() })).collect();
    let doc = RatesDocument {
        command,
        problem: &r.problem.name,
        surrogate: kind_name(r.surrogate.kind),
        reference_resolution: r.m,
        seed: r.seed,
        sweep: r.surrogate.sweep()?,
        columns: &columns,
        fits: &fits,
        resolution_checks: &run.resolution_checks,
        failures,
    };
    let files = emit_outputs(&r.out, &columns, &run.records, &fits, &doc)?;
    let mut lines = vec![format!("{command}: {} with {} surrogate, M = {}", r.problem.name, doc.surrogate, r.m)];
    for (col, outcomes) in &fits {
        for o in outcomes {
            lines.push(match o {
                FitOutcome::Fit(f) => format!(
                    "{col} {:?} fit: slope {:.4}, R^2 {:.4} over N in [{}, {}]",
                    f.model, f.slope, f.r_squared, f.n_min, f.n_max
                ),
                FitOutcome::Failed { model, error } => format!("{col} {model:?} fit unavailable: {error}"),
            });
        }
    }
    for c in &run.resolution_checks {
        lines.push(format!("resolution check N = {}: W_1 {:.6e} at M, {:.6e} at 2M (relative change {:.3e})", c.n, c.w1, c.w1_doubled, c.relative_change));
    }
    for f in &doc.failures {
        lines.push(format!("N = {} failed: {}", f.n, f.message));
    }
    Ok(CommandReport { files, lines })
}

fn sweep_options(config: &ExperimentConfig, opts: &RunOptions) -> SweepOptions {
    SweepOptions { exec: opts.exec, timing: config.timing, resolution_check: config.resolution_check }
}

/// Convergence sweep; defaults to the spline sweep on the tanh problem with `W_1`.
pub fn run_converge(config: &ExperimentConfig, opts: &RunOptions) -> Result<CommandReport> {
    let r = resolve(config, opts, ProblemName::TanhPaper, SurrogateKind::Spline)?;
    let metrics = config.metrics_or(&[Metric::W1])?;
    let run = run_convergence(&r.problem, &r.surrogate, &metrics, r.m, sweep_options(config, opts))?;
    sweep_outputs("converge", &r, &run)
}

/// Bound audit of the fixed pair, or of the surrogate at the largest sweep point.
pub fn run_bounds(config: &ExperimentConfig, opts: &RunOptions) -> Result<CommandReport> {
    let r = resolve(config, opts, ProblemName::OscillatoryG, SurrogateKind::Spline)?;
    let bounds = config.bounds.clone().unwrap_or_default();
    let outcome = audit_bounds(&r.problem, &r.surrogate, &bounds, r.m, opts.exec)?;
    ensure_dir(&r.out)?;
    let csv_path = r.out.join(BOUNDS_CSV);
    let rows: Vec<Vec<String>> = outcome
        .checks
        .iter()
        .map(|c| vec![c.name.clone(), format_float(c.lhs), format_float(c.rhs), c.holds.to_string()])
        .collect();
    write_csv(&csv_path, &["check".into(), "lhs".into(), "rhs".into(), "holds".into()], &rows)?;
    let json_path = r.out.join(BOUNDS_JSON);
    #[derive(Serialize)]
    struct Doc<'a> {
        command: &'static str,
        seed: u64,
        bounds: &'a BoundsSpec,
        audit: &'a audit::AuditOutcome,
    }
    write_json(&json_path, &Doc { command: "bounds", seed: r.seed, bounds: &bounds, audit: &outcome })?;
    Ok(CommandReport { files: vec![csv_path, json_path], lines: outcome.verdict_lines() })
}

/// Spline versus histogram pipelines on the configured problem.
pub fn run_compare_hist(config: &ExperimentConfig, opts: &RunOptions) -> Result<CommandReport> {
    let r = resolve(config, opts, ProblemName::TanhPaper, SurrogateKind::Spline)?;
    let spec = config.histogram.clone().unwrap_or_default();
    let rows = histogram::compare_histogram(&r.problem, &spec, r.seed, r.m, opts.exec)?;
    let columns: Vec<String> = histogram::COLUMNS.iter().map(|s| s.to_string()).collect();
    let records: Vec<_> = rows.iter().map(histogram::HistogramRow::record).collect();
    let ns: Vec<f64> = rows.iter().map(|row| row.n as f64).collect();
    let series = [
        rows.iter().map(|row| row.spline_w1).collect::<Vec<_>>(),
        rows.iter().map(|row| row.histogram_w1).collect(),
        rows.iter().map(|row| row.emp_hist_w1).collect(),
    ];
    let fits: BTreeMap<String, Vec<FitOutcome>> =
        columns.iter().zip(&series).map(|(c, s)| (c.clone(), vec![FitOutcome::compute(&ns, s, RateModel::Power)])).collect();
    let spline_wins = rows.iter().filter(|row| row.n >= 16).all(|row| row.spline_w1 < row.histogram_w1);

    #[derive(Serialize)]
    struct Doc<'a> {
        command: &'static str,
        problem: &'a str,
        reference_resolution: usize,
        seed: u64,
        histogram: &'a HistogramSpec,
        columns: &'a [String],
        fits: &'a BTreeMap<String, Vec<FitOutcome>>,
        spline_smaller_for_all_n_ge_16: bool,
    }
    let doc = Doc {
        command: "compare-hist",
        problem: &r.problem.name,
        reference_resolution: r.m,
        seed: r.seed,
        histogram: &spec,
        columns: &columns,
        fits: &fits,
        spline_smaller_for_all_n_ge_16: spline_wins,
    };
    let files = emit_outputs(&r.out, &columns, &records, &fits, &doc)?;
    let mut lines = vec![format!("compare-hist: {} over {} seeds, M = {}", r.problem.name, spec.seeds, r.m)];
    for (col, outcomes) in &fits {
        if let Some(FitOutcome::Fit(f)) = outcomes.first() {
            lines.push(format!("{col} power fit: slope {:.4}, R^2 {:.4}", f.slope, f.r_squared));
        }
    }
    lines.push(format!("spline error below histogram error for every N >= 16: {spline_wins}"));
    Ok(CommandReport { files, lines })
}

/// Oscillator sweep with piecewise-linear surrogates plus `densities.csv` for
/// the coarsest surrogate.
pub fn run_demo_oscillator(config: &ExperimentConfig, opts: &RunOptions) -> Result<CommandReport> {
    let r = resolve(config, opts, ProblemName::Oscillator, SurrogateKind::Pwl)?;
    let metrics = config.metrics_or(&[Metric::W1, Metric::W2, Metric::L1Cdf, Metric::L1Pdf, Metric::Hm1])?;
    let run = run_convergence(&r.problem, &r.surrogate, &metrics, r.m, sweep_options(config, opts))?;
    let mut report = sweep_outputs("demo-oscillator", &r, &run)?;
    let n0 = r.surrogate.sweep()?[0];
    let (summary, path) = demo::oscillator_densities(&r.problem, &r.surrogate, n0, r.m, &r.out)?;
    report.files.push(path);
    report.lines.extend(summary.lines());
    Ok(report)
}

/// Read a config file, or use defaults when no path is given.
pub fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    }
}

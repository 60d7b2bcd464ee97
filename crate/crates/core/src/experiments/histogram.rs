//! Surrogate pipeline versus histogram density estimation at equal sample budgets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{HistogramSpec, SurrogateKind, SurrogateSpec};
use super::convergence::{ConvergenceRecord, Reference};
use super::problems::Problem;
use crate::density::{empirical_measure, histogram_estimate, histogram_to_measure};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::measure::wasserstein_p;
use crate::pushforward::sample_density;

pub const COLUMNS: [&str; 3] = ["spline_w1", "histogram_w1", "emp_hist_w1"];

/// Per-budget averages over seeds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    pub n: usize,
    /// `W_1(f_*ρ, g_*ρ)` for the cubic spline through the budget's nodes.
    pub spline_w1: f64,
    /// Mean of `W_1(f_*ρ, μ_hist)` with `N` draws and `N` bins.
    pub histogram_w1: f64,
    /// Mean of `W_1(μ_emp, μ_hist)` over the same draws.
    pub emp_hist_w1: f64,
}

impl HistogramRow {
    pub fn record(&self) -> ConvergenceRecord {
        ConvergenceRecord {
            n: self.n,
            values: vec![Some(self.spline_w1), Some(self.histogram_w1), Some(self.emp_hist_w1)],
            walltime_ms: None,
            failure: None,
        }
    }
}

/// Independent generator for draw set `(seed_index, budget)`: the run seed
/// offset by the seed index picks the key, the budget picks the stream.
pub fn draw_rng(run_seed: u64, seed_index: usize, budget: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed.wrapping_add(seed_index as u64));
    rng.set_stream(budget as u64);
    rng
}

/// Run both pipelines on every budget.
///
/// 1D problems use a not-a-knot spline with `N` nodes; 2D problems a tensor
/// spline with `⌈√N⌉` nodes per axis (at least 4).
pub fn compare_histogram(problem: &Problem, spec: &HistogramSpec, run_seed: u64, m: usize, exec: Execution) -> Result<Vec<HistogramRow>> {
    let d = problem.bbox.dim();
    if d > 2 {
        return Err(Error::Unsupported(format!("histogram comparison needs a 1D or 2D problem, got dimension {d}")));
    }
    if spec.budgets.is_empty() || spec.budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("budgets must be nonempty and strictly increasing, got {:?}", spec.budgets)));
    }
    if spec.seeds == 0 {
        return Err(Error::Config("histogram comparison needs at least one seed".into()));
    }
    let reference = Reference::new(problem, m, exec)?;
    let spline_spec = SurrogateSpec::of(if d == 1 { SurrogateKind::Spline } else { SurrogateKind::TensorSpline });

    let spline_errors: Vec<Result<f64>> = exec::map_slice(exec, &spec.budgets, |&n| {
        let nodes = if d == 1 { n } else { ((n as f64).sqrt().ceil() as usize).max(4) };
        let g = problem.fit_surrogate(&spline_spec, nodes)?;
        wasserstein_p(reference.measure(), &reference.push(&g, Execution::Sequential)?, 1.0)
    });

    let tasks: Vec<(usize, usize)> = spec.budgets.iter().flat_map(|&n| (0..spec.seeds).map(move |s| (n, s))).collect();
    let draws: Vec<Result<(f64, f64)>> = exec::map_slice(exec, &tasks, |&(n, s)| {
        let mut rng = draw_rng(run_seed, s, n);
        let points = sample_density(&problem.bbox, &problem.weight, n, &mut rng)?;
        let ys: Vec<f64> = points.chunks(d).map(|x| (problem.f)(x)).collect();
        let hist = histogram_estimate(&ys, n, None)?;
        let mu_hist = histogram_to_measure(&hist, spec.atoms_per_bin)?;
        let mu_emp = empirical_measure(&ys)?;
        Ok((wasserstein_p(reference.measure(), &mu_hist, 1.0)?, wasserstein_p(&mu_emp, &mu_hist, 1.0)?))
    });

    let mut rows = Vec::with_capacity(spec.budgets.len());
    let mut draws = draws.into_iter();
    for (&n, spline) in spec.budgets.iter().zip(spline_errors) {
        let (mut hist_sum, mut emp_sum) = (0.0, 0.0);
        for _ in 0..spec.seeds {
            let (h, e) = draws.next().expect("one result per task")?;
            hist_sum += h;
            emp_sum += e;
        }
        let k = spec.seeds as f64;
        rows.push(HistogramRow { n, spline_w1: spline?, histogram_w1: hist_sum / k, emp_hist_w1: emp_sum / k });
    }
    Ok(rows)
}

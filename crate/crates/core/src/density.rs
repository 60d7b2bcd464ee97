//! Densities of pushforwards of piecewise-monotone maps, histogram
//! estimators and empirical measures.
//!
//! For `h` strictly monotone on each piece `I_j`, the pushforward of
//! `r(α) dα` has density `p(y) = Σ_j r(h_j⁻¹(y)) / |h'(h_j⁻¹(y))|`, summed over
//! the pieces whose range contains `y`.

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::measure::Measure1D;
use crate::pushforward::{DensityWeight, Evaluable};

/// Preimages are located to this absolute tolerance.
pub const BISECTION_TOLERANCE: f64 = 1e-12;

/// Derivatives below this magnitude at a preimage are rejected.
pub const FLAT_DERIVATIVE: f64 = 1e-10;

/// Default number of points in a density evaluation grid.
pub const DEFAULT_GRID_POINTS: usize = 2000;

/// A density on the real line that can be sampled pointwise.
pub trait Density1D {
    fn density_at(&self, y: f64) -> f64;
    /// Closed interval outside which the density vanishes.
    fn support(&self) -> (f64, f64);
}

/// Pushforward density tabulated on a grid, linearly interpolated between
/// grid points and zero outside the covered ranges.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePdf {
    grid: Vec<f64>,
    values: Vec<f64>,
    pieces: Vec<(f64, f64)>,
    /// Range of `h` over each piece.
    ranges: Vec<(f64, f64)>,
}

impl PiecewisePdf {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.ranges
    }

    /// Largest tabulated density value.
    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Trapezoid integral of the tabulated density.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.grid, &self.values)
    }

    /// Cumulative trapezoid integral at every grid point.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.values[i] + self.values[i - 1]) * (self.grid[i] - self.grid[i - 1]);
            out.push(acc);
        }
        out
    }
}

impl Density1D for PiecewisePdf {
    fn density_at(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y < lo || y > hi || y < self.grid[0] || y > *self.grid.last().unwrap() {
            return 0.0;
        }
        let i = self.grid.partition_point(|&g| g <= y);
        if i == 0 {
            return self.values[0];
        }
        if i == self.grid.len() {
            return *self.values.last().unwrap();
        }
        let (g0, g1) = (self.grid[i - 1], self.grid[i]);
        let t = (y - g0) / (g1 - g0);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }

    fn support(&self) -> (f64, f64) {
        self.ranges.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(a, b)| (lo.min(a), hi.max(b)))
    }
}

/// Density of `h_*ρ` on `y_grid` for `h` strictly monotone on each piece.
///
/// Pieces must be nonempty intervals inside the weight's domain; monotonicity
/// is checked on 65 sample points per piece. Preimages come from bisection,
/// `h'` from second-order differences with step `1e-6 · (piece length)`.
pub fn pdf_piecewise_monotone<H: Evaluable + ?Sized>(
    h: &H,
    weight: &DensityWeight,
    pieces: &[(f64, f64)],
    y_grid: &[f64],
) -> Result<PiecewisePdf> {
    if pieces.is_empty() {
        return Err(Error::Empty("no monotone pieces"));
    }
    if y_grid.len() < 2 || y_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("y grid needs at least 2 strictly increasing points"));
    }
    let h1 = |x: f64| h.eval(&[x]);
    let mut ranges = Vec::with_capacity(pieces.len());
    for &(a, b) in pieces {
        if !(a < b) {
            return Err(Error::invalid(format!("empty piece [{a}, {b}]")));
        }
        let samples: Vec<f64> = (0..=64).map(|i| h1(a + (b - a) * i as f64 / 64.0)).collect();
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteAtNode { node: vec![a + (b - a) * i as f64 / 64.0], value: samples[i] });
        }
        let increasing = samples.windows(2).all(|w| w[1] > w[0]);
        let decreasing = samples.windows(2).all(|w| w[1] < w[0]);
        if !increasing && !decreasing {
            return Err(Error::invalid(format!("h is not strictly monotone on [{a}, {b}]")));
        }
        let (ha, hb) = (h1(a), h1(b));
        ranges.push((ha.min(hb), ha.max(hb)));
    }

    let values: Vec<Result<f64>> = exec::map_slice(Execution::default(), y_grid, |&y| {
        let mut total = 0.0;
        for (&(a, b), &(lo, hi)) in pieces.iter().zip(&ranges) {
            if y < lo || y > hi {
                continue;
            }
            let x = invert_monotone(&h1, a, b, y);
            let dh = derivative(&h1, a, b, x);
            if dh.abs() < FLAT_DERIVATIVE {
                return Err(Error::NearFlat { x, y, derivative: dh });
            }
            total += weight.density(&[x]) / dh.abs();
        }
        Ok(total)
    });
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(PiecewisePdf { grid: y_grid.to_vec(), values, pieces: pieces.to_vec(), ranges })
}

/// Solve `h(x) = y` on `[a, b]` for monotone `h` by bisection.
fn invert_monotone(h: &impl Fn(f64) -> f64, a: f64, b: f64, y: f64) -> f64 {
    let increasing = h(b) >= h(a);
    let (mut lo, mut hi) = (a, b);
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (h(mid) < y) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Second-order difference for `h'(x)`, one-sided within a step of the ends.
fn derivative(h: &impl Fn(f64) -> f64, a: f64, b: f64, x: f64) -> f64 {
    let s = 1e-6 * (b - a);
    if x - s < a {
        (-3.0 * h(x) + 4.0 * h(x + s) - h(x + 2.0 * s)) / (2.0 * s)
    } else if x + s > b {
        (3.0 * h(x) - 4.0 * h(x - s) + h(x - 2.0 * s)) / (2.0 * s)
    } else {
        (h(x + s) - h(x - s)) / (2.0 * s)
    }
}

/// `n` equispaced points spanning the union of `ranges`, padded by 1% per side.
pub fn default_y_grid(ranges: &[(f64, f64)], n: usize) -> Result<Vec<f64>> {
    if ranges.is_empty() || n < 2 {
        return Err(Error::invalid("a y grid needs at least one range and two points"));
    }
    let (lo, hi) = ranges.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(a, b)| (lo.min(a), hi.max(b)));
    let pad = 0.01 * (hi - lo).max(f64::EPSILON);
    let (lo, hi) = (lo - pad, hi + pad);
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

/// `∫ |p₁ − p₂| dy` by the trapezoid rule on `y_grid`.
pub fn l1_pdf_distance(p1: &dyn Density1D, p2: &dyn Density1D, y_grid: &[f64]) -> Result<f64> {
    if y_grid.len() < 2 {
        return Err(Error::invalid("y grid needs at least 2 points"));
    }
    let (g0, g1) = (y_grid[0], *y_grid.last().unwrap());
    for (name, p) in [("first", p1), ("second", p2)] {
        let (lo, hi) = p.support();
        if hi < g0 || lo > g1 {
            return Err(Error::invalid(format!("{name} density support [{lo}, {hi}] is disjoint from the grid [{g0}, {g1}]")));
        }
    }
    let diffs: Vec<f64> = y_grid.iter().map(|&y| (p1.density_at(y) - p2.density_at(y)).abs()).collect();
    Ok(trapezoid(y_grid, &diffs))
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (ys[0] + ys[1]) * (xs[1] - xs[0])).sum()
}

/// Uniform-weight atomic measure on the samples.
pub fn empirical_measure(samples: &[f64]) -> Result<Measure1D> {
    Measure1D::from_samples(samples, None)
}

/// Equal-width histogram with bin masses summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct HistogramDensity {
    edges: Vec<f64>,
    masses: Vec<f64>,
    samples: usize,
}

impl HistogramDensity {
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn sample_count(&self) -> usize {
        self.samples
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }
}

impl Density1D for HistogramDensity {
    fn density_at(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y < lo || y > hi {
            return 0.0;
        }
        let l = self.masses.len();
        let i = (((y - lo) / self.bin_width()) as usize).min(l - 1);
        self.masses[i] / self.bin_width()
    }

    fn support(&self) -> (f64, f64) {
        (self.edges[0], *self.edges.last().unwrap())
    }
}

/// Histogram of `samples` with `bins` equal-width bins on `range`
/// (default `[min, max]`). Bins are half-open except the last, which is closed.
pub fn histogram_estimate(samples: &[f64], bins: usize, range: Option<(f64, f64)>) -> Result<HistogramDensity> {
    if samples.is_empty() {
        return Err(Error::Empty("histogram of no samples"));
    }
    if bins == 0 {
        return Err(Error::invalid("histogram needs at least one bin"));
    }
    if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index, value: samples[index] });
    }
    let (lo, hi) = match range {
        Some((lo, hi)) => {
            if !(lo < hi) {
                return Err(Error::invalid(format!("invalid histogram range [{lo}, {hi}]")));
            }
            (lo, hi)
        }
        None => {
            let (lo, hi) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            if lo < hi { (lo, hi) } else { (lo - 0.5, hi + 0.5) }
        }
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        if x < lo || x > hi {
            return Err(Error::OutOfDomain { point: vec![x] });
        }
        counts[(((x - lo) / width) as usize).min(bins - 1)] += 1;
    }
    let n = samples.len() as f64;
    let edges = (0..=bins).map(|i| if i == bins { hi } else { lo + width * i as f64 }).collect();
    Ok(HistogramDensity { edges, masses: counts.into_iter().map(|c| c as f64 / n).collect(), samples: samples.len() })
}

/// Atomic stand-in for the histogram measure: each nonempty bin contributes
/// `atoms_per_bin` equally spaced cell midpoints sharing the bin mass.
pub fn histogram_to_measure(hist: &HistogramDensity, atoms_per_bin: usize) -> Result<Measure1D> {
    if atoms_per_bin == 0 {
        return Err(Error::invalid("atoms_per_bin must be at least 1"));
    }
    let k = atoms_per_bin as f64;
    let mut atoms = Vec::new();
    let mut weights = Vec::new();
    for (edge, &mass) in hist.edges.windows(2).zip(&hist.masses) {
        if mass == 0.0 {
            continue;
        }
        let w = edge[1] - edge[0];
        for j in 0..atoms_per_bin {
            atoms.push(edge[0] + (j as f64 + 0.5) * w / k);
            weights.push(mass / k);
        }
    }
    Measure1D::from_samples(&atoms, Some(&weights))
}

//! Seeded families of smooth test functions and pairs on `[0, 1]`.
//!
//! Every function is `c + s·x + Σ a sin(ω x + φ)`, so values and
//! derivatives are closed-form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pushforward::Evaluable;

#[derive(Clone, Debug, PartialEq)]
pub struct TrigSeries {
    pub offset: f64,
    pub slope: f64,
    /// `(amplitude, frequency, phase)`.
    pub terms: Vec<(f64, f64, f64)>,
}

impl TrigSeries {
    pub fn value(&self, x: f64) -> f64 {
        self.offset + self.slope * x + self.terms.iter().map(|&(a, w, p)| a * (w * x + p).sin()).sum::<f64>()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.slope + self.terms.iter().map(|&(a, w, p)| a * w * (w * x + p).cos()).sum::<f64>()
    }

    /// `self + other` as one series.
    pub fn plus(&self, other: &TrigSeries) -> TrigSeries {
        TrigSeries {
            offset: self.offset + other.offset,
            slope: self.slope + other.slope,
            terms: self.terms.iter().chain(&other.terms).copied().collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> TrigSeries {
        TrigSeries { offset: c * self.offset, slope: c * self.slope, terms: self.terms.iter().map(|&(a, w, p)| (c * a, w, p)).collect() }
    }

    /// `min f'` over `samples + 1` equispaced points of `[0, 1]`.
    pub fn min_derivative(&self, samples: usize) -> f64 {
        (0..=samples).map(|i| self.derivative(i as f64 / samples as f64)).fold(f64::INFINITY, f64::min)
    }
}

impl Evaluable for TrigSeries {
    fn eval(&self, x: &[f64]) -> f64 {
        self.value(x[0])
    }
}

fn rng(seed: u64, family: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(family);
    r
}

fn random_series<R: Rng>(r: &mut R, terms: usize, amplitude: f64) -> TrigSeries {
    TrigSeries {
        offset: r.random_range(-1.0..1.0),
        slope: r.random_range(-1.0..1.0),
        terms: (0..terms)
            .map(|_| (amplitude * r.random_range(-1.0..1.0), r.random_range(0.5..12.0), r.random_range(0.0..std::f64::consts::TAU)))
            .collect(),
    }
}

/// `count` smooth functions with up to four oscillatory terms.
pub fn random_smooth_functions(count: usize, seed: u64) -> Vec<TrigSeries> {
    let mut r = rng(seed, 1);
    (0..count)
        .map(|_| {
            let terms = r.random_range(1..=4);
            random_series(&mut r, terms, 1.0)
        })
        .collect()
}

/// Pairs `(f, g)` with `g = f + ε h` for a smooth `h` and `ε` spread over
/// `[10⁻³, 1]` on a log scale.
pub fn random_smooth_pairs(count: usize, seed: u64) -> Vec<(TrigSeries, TrigSeries)> {
    let mut r = rng(seed, 2);
    (0..count)
        .map(|_| {
            let terms = r.random_range(1..=4);
            let f = random_series(&mut r, terms, 1.0);
            let eps = 10f64.powf(r.random_range(-3.0..0.0));
            let h_terms = r.random_range(1..=3);
            let h = random_series(&mut r, h_terms, 1.0);
            let g = f.plus(&h.scaled(eps));
            (f, g)
        })
        .collect()
}

/// Pairs with `f ≥ g` everywhere: `g = f − c − Σ a sin(…)` with `c > Σ |a|`.
pub fn ordered_pairs(count: usize, seed: u64) -> Vec<(TrigSeries, TrigSeries)> {
    let mut r = rng(seed, 3);
    (0..count)
        .map(|_| {
            let terms = r.random_range(1..=4);
            let f = random_series(&mut r, terms, 1.0);
            let gap_terms = r.random_range(1..=3);
            let mut gap = random_series(&mut r, gap_terms, 0.2);
            gap.slope = 0.0;
            let total: f64 = gap.terms.iter().map(|t| t.0.abs()).sum();
            gap.offset = total + r.random_range(0.0..0.3);
            (f.clone(), f.plus(&gap.scaled(-1.0)))
        })
        .collect()
}

/// Strictly increasing function with `f' ≥ min_slope`.
fn monotone_series<R: Rng>(r: &mut R, min_slope: f64) -> TrigSeries {
    let terms = r.random_range(1..=3);
    let mut s = random_series(r, terms, 0.3);
    let worst: f64 = s.terms.iter().map(|&(a, w, _)| (a * w).abs()).sum();
    s.slope = min_slope + worst + r.random_range(0.0..1.0);
    s
}

/// Strictly increasing pairs with slopes at least `min_slope`.
pub fn monotone_pairs(count: usize, seed: u64, min_slope: f64) -> Vec<(TrigSeries, TrigSeries)> {
    let mut r = rng(seed, 4);
    (0..count).map(|_| (monotone_series(&mut r, min_slope), monotone_series(&mut r, min_slope))).collect()
}

//! Finitely atomic probability measures on the real line.
//!
//! Every measure in the crate is a [`Measure1D`]: sorted atom locations with
//! positive weights summing to one. Continuous measures only enter through a
//! discretization (see [`crate::pushforward`]), so all distances computed here
//! are exact on their inputs.
//!
//! Conventions: the CDF is right-continuous, `F(y) = σ((−∞, y])`, and the
//! quantile function is the left-continuous generalized inverse
//! `F⁻¹(t) = inf{x : F(x) ≥ t}`. Both are step functions, so the Wasserstein
//! integral `∫₀¹ |F_μ⁻¹ − F_ν⁻¹|^p dt` and the CDF integrals reduce to finite
//! sums over merged breakpoints.

use itertools::Itertools;

use crate::error::{Error, Result};

/// Maximum tolerated deviation of the total weight from one.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability measure with finitely many atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure1D {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    /// Cumulative weights; `cumulative[i] = F(atoms[i])`, last entry exactly 1.
    cumulative: Vec<f64>,
}

impl Measure1D {
    /// Build a measure from sample values with optional weights.
    ///
    /// Values are sorted, bitwise-equal values are merged (weights summed),
    /// missing weights default to uniform, and weights are renormalized.
    pub fn from_samples(values: &[f64], weights: Option<&[f64]>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("measure needs at least one atom"));
        }
        if let Some((index, &value)) = values.iter().find_position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        let weights: Vec<f64> = match weights {
            Some(w) => {
                if w.len() != values.len() {
                    return Err(Error::LengthMismatch(values.len(), w.len()));
                }
                if let Some((index, &value)) = w.iter().find_position(|&&x| !(x > 0.0 && x.is_finite())) {
                    return Err(Error::NonPositiveWeight { index, value });
                }
                w.to_vec()
            }
            None => vec![1.0; values.len()],
        };

        let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut atoms: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut merged: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            // -0.0 and 0.0 compare equal here and merge, which is what a
            // measure on R should do.
            match atoms.last() {
                Some(&last) if last == x => *merged.last_mut().unwrap() += w,
                _ => {
                    atoms.push(x);
                    merged.push(w);
                }
            }
        }
        let total: f64 = merged.iter().sum();
        merged.iter_mut().for_each(|w| *w /= total);
        Ok(Self::from_sorted_parts(atoms, merged))
    }

    /// Uniform-weight measure on `values` (the empirical measure).
    pub fn uniform(values: &[f64]) -> Result<Self> {
        Self::from_samples(values, None)
    }

    /// The Dirac measure at `x`.
    pub fn dirac(x: f64) -> Result<Self> {
        Self::from_samples(&[x], None)
    }

    fn from_sorted_parts(atoms: Vec<f64>, weights: Vec<f64>) -> Self {
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Measure1D { atoms, weights, cumulative }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Weight carried by the atom located exactly at `x` (zero if none).
    pub fn mass_at(&self, x: f64) -> f64 {
        match self.atoms.binary_search_by(|a| a.total_cmp(&x)) {
            Ok(i) => self.weights[i],
            Err(_) => 0.0,
        }
    }

    pub fn min(&self) -> f64 {
        self.atoms[0]
    }

    pub fn max(&self) -> f64 {
        *self.atoms.last().unwrap()
    }

    /// The measure translated by `t`.
    pub fn shifted(&self, t: f64) -> Result<Self> {
        let atoms: Vec<f64> = self.atoms.iter().map(|x| x + t).collect();
        if atoms.iter().all(|x| x.is_finite()) && atoms.windows(2).all(|w| w[0] < w[1]) {
            // Keep the cumulative weights bit-identical so the shift is exact in W_p.
            return Ok(Measure1D { atoms, weights: self.weights.clone(), cumulative: self.cumulative.clone() });
        }
        Self::from_samples(&atoms, Some(&self.weights))
    }

    pub fn cdf(&self) -> CdfView<'_> {
        CdfView { measure: self }
    }

    pub fn quantile(&self) -> QuantileView<'_> {
        QuantileView { measure: self }
    }

    /// `Σ wᵢ xᵢᵏ`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k < 1 {
            return Err(Error::invalid("moment order must be at least 1"));
        }
        Ok(self
            .atoms
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * x.powi(k as i32))
            .sum())
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().zip(&self.weights).map(|(x, w)| w * x).sum()
    }

    /// True when every weight equals `1/n` to within [`MASS_TOLERANCE`].
    pub fn has_uniform_weights(&self) -> bool {
        let u = 1.0 / self.len() as f64;
        self.weights.iter().all(|w| (w - u).abs() <= MASS_TOLERANCE)
    }
}

/// Right-continuous CDF `F(y) = σ((−∞, y])` of a [`Measure1D`].
#[derive(Clone, Copy, Debug)]
pub struct CdfView<'a> {
    measure: &'a Measure1D,
}

impl CdfView<'_> {
    pub fn eval(&self, y: f64) -> f64 {
        let n = self.measure.atoms.partition_point(|&a| a <= y);
        if n == 0 {
            0.0
        } else {
            self.measure.cumulative[n - 1]
        }
    }
}

/// Left-continuous generalized inverse of the CDF on `(0, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct QuantileView<'a> {
    measure: &'a Measure1D,
}

impl QuantileView<'_> {
    pub fn eval(&self, t: f64) -> f64 {
        let m = self.measure;
        let i = m.cumulative.partition_point(|&c| c < t);
        m.atoms[i.min(m.len() - 1)]
    }
}

/// Order-`p` Wasserstein distance, computed exactly by a merge sweep over the
/// union of cumulative-weight breakpoints of both quantile functions.
pub fn wasserstein_p(mu: &Measure1D, nu: &Measure1D, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::invalid(format!("Wasserstein order must be finite and >= 1, got {p}")));
    }
    let cost = |d: f64| if p == 1.0 { d } else if p == 2.0 { d * d } else { d.powf(p) };
    let (ca, cb) = (&mu.cumulative, &nu.cumulative);
    let (mut i, mut j) = (0, 0);
    let mut t_prev = 0.0;
    let mut total = 0.0;
    while i < ca.len() && j < cb.len() {
        let t = ca[i].min(cb[j]);
        let dt = t - t_prev;
        if dt > 0.0 {
            total += dt * cost((mu.atoms[i] - nu.atoms[j]).abs());
        }
        t_prev = t;
        if ca[i] <= t {
            i += 1;
        }
        if cb[j] <= t {
            j += 1;
        }
    }
    Ok(if p == 1.0 { total } else { total.powf(1.0 / p) })
}

/// Sweep `|F_μ − F_ν|` over the merged atom set, yielding `(gap, length)`
/// for each interval between consecutive support points.
fn cdf_gaps<'a>(mu: &'a Measure1D, nu: &'a Measure1D) -> impl Iterator<Item = (f64, f64)> + 'a {
    let merged: Vec<f64> = mu.atoms.iter().merge(nu.atoms.iter()).copied().dedup().collect();
    let (mut i, mut j) = (0usize, 0usize);
    let (mut fa, mut fb) = (0.0, 0.0);
    merged.into_iter().tuple_windows().map(move |(x, x_next)| {
        while i < mu.atoms.len() && mu.atoms[i] <= x {
            fa = mu.cumulative[i];
            i += 1;
        }
        while j < nu.atoms.len() && nu.atoms[j] <= x {
            fb = nu.cumulative[j];
            j += 1;
        }
        ((fa - fb).abs(), x_next - x)
    })
}

/// `∫ |F_μ(x) − F_ν(x)| dx`, which equals `W₁(μ, ν)`.
pub fn w1_via_cdf(mu: &Measure1D, nu: &Measure1D) -> f64 {
    cdf_gaps(mu, nu).map(|(gap, len)| gap * len).sum()
}

/// `(∫ |F_μ(x) − F_ν(x)|² dx)^{1/2}`, the homogeneous `Ḣ⁻¹` seminorm of `μ − ν`.
pub fn hminus1_distance(mu: &Measure1D, nu: &Measure1D) -> f64 {
    cdf_gaps(mu, nu).map(|(gap, len)| gap * gap * len).sum::<f64>().sqrt()
}

/// Largest instance accepted by [`brute_force_wp`].
pub const BRUTE_FORCE_MAX_ATOMS: usize = 8;

/// Literal minimization over all permutation couplings of two uniform-weight
/// measures with the same number of atoms. Test oracle for small inputs.
pub fn brute_force_wp(mu: &Measure1D, nu: &Measure1D, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::invalid(format!("Wasserstein order must be finite and >= 1, got {p}")));
    }
    let n = mu.len();
    if n != nu.len() {
        return Err(Error::LengthMismatch(n, nu.len()));
    }
    if n > BRUTE_FORCE_MAX_ATOMS {
        return Err(Error::invalid(format!("brute force limited to {BRUTE_FORCE_MAX_ATOMS} atoms, got {n}")));
    }
    if !mu.has_uniform_weights() || !nu.has_uniform_weights() {
        return Err(Error::invalid("brute force requires uniform weights"));
    }
    let best = (0..n)
        .permutations(n)
        .map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(i, &j)| (mu.atoms[i] - nu.atoms[j]).abs().powf(p))
                .sum::<f64>()
                / n as f64
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(values: &[f64]) -> Measure1D {
        Measure1D::uniform(values).unwrap()
    }

    #[test]
    fn single_value_is_dirac() {
        let d = m(&[1.0]);
        assert_eq!(d.atoms(), &[1.0]);
        assert_eq!(d.weights(), &[1.0]);
    }

    #[test]
    fn duplicates_merge() {
        let d = m(&[0.5, 0.5, 1.0]);
        assert_eq!(d.atoms(), &[0.5, 1.0]);
        assert!((d.weights()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.weights()[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn near_duplicates_stay_distinct() {
        let d = m(&[0.5, 0.5 + f64::EPSILON]);
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(Measure1D::uniform(&[]), Err(Error::Empty(_))));
        assert!(matches!(Measure1D::uniform(&[1.0, f64::NAN]), Err(Error::NonFinite { index: 1, .. })));
        assert!(matches!(Measure1D::uniform(&[f64::INFINITY]), Err(Error::NonFinite { .. })));
        assert!(matches!(
            Measure1D::from_samples(&[1.0, 2.0], Some(&[1.0, 0.0])),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            Measure1D::from_samples(&[1.0, 2.0], Some(&[1.0])),
            Err(Error::LengthMismatch(2, 1))
        ));
    }

    #[test]
    fn weights_renormalize() {
        let d = Measure1D::from_samples(&[3.0, 1.0], Some(&[3.0, 1.0])).unwrap();
        assert_eq!(d.atoms(), &[1.0, 3.0]);
        assert_eq!(d.weights(), &[0.25, 0.75]);
        assert!((d.weights().iter().sum::<f64>() - 1.0).abs() <= MASS_TOLERANCE);
    }

    #[test]
    fn cdf_and_quantile_conventions() {
        let d = Measure1D::from_samples(&[0.0, 1.0, 2.0], Some(&[0.25, 0.5, 0.25])).unwrap();
        let f = d.cdf();
        assert_eq!(f.eval(-1.0), 0.0);
        assert_eq!(f.eval(0.0), 0.25);
        assert_eq!(f.eval(0.999), 0.25);
        assert_eq!(f.eval(1.0), 0.75);
        assert_eq!(f.eval(5.0), 1.0);
        let q = d.quantile();
        assert_eq!(q.eval(0.1), 0.0);
        assert_eq!(q.eval(0.25), 0.0);
        assert_eq!(q.eval(0.26), 1.0);
        assert_eq!(q.eval(0.75), 1.0);
        assert_eq!(q.eval(1.0), 2.0);
    }

    #[test]
    fn dirac_distance_is_gap() {
        let w = wasserstein_p(&m(&[0.0]), &m(&[2.0]), 3.0).unwrap();
        assert_eq!(w, 2.0);
    }

    #[test]
    fn identical_measures_are_at_zero_distance() {
        let a = Measure1D::from_samples(&[0.1, 0.7, 3.0], Some(&[0.2, 0.3, 0.5])).unwrap();
        for p in [1.0, 2.0, 3.5] {
            assert_eq!(wasserstein_p(&a, &a, p).unwrap(), 0.0);
        }
        assert_eq!(w1_via_cdf(&a, &a), 0.0);
        assert_eq!(hminus1_distance(&a, &a), 0.0);
    }

    #[test]
    fn two_point_example_matches_enumeration() {
        let a = m(&[0.0, 1.0]);
        let b = m(&[0.5, 1.5]);
        // Enumerated: identity pairing costs (0.5 + 0.5)/2, swap costs (1.5 + 0.5)/2.
        assert!((wasserstein_p(&a, &b, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((brute_force_wp(&a, &b, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((w1_via_cdf(&a, &b) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn order_below_one_rejected() {
        let a = m(&[0.0]);
        assert!(wasserstein_p(&a, &a, 0.5).is_err());
        assert!(wasserstein_p(&a, &a, f64::NAN).is_err());
        assert!(brute_force_wp(&a, &a, 0.9).is_err());
    }

    #[test]
    fn brute_force_preconditions() {
        let nine: Vec<f64> = (0..9).map(f64::from).collect();
        assert!(brute_force_wp(&m(&nine), &m(&nine), 1.0).is_err());
        assert!(brute_force_wp(&m(&[0.0, 1.0]), &m(&[0.0]), 1.0).is_err());
        let skew = Measure1D::from_samples(&[0.0, 1.0], Some(&[0.3, 0.7])).unwrap();
        assert!(brute_force_wp(&skew, &m(&[0.0, 1.0]), 1.0).is_err());
        assert_eq!(brute_force_wp(&m(&[0.3, 0.1, 0.9]), &m(&[0.3, 0.1, 0.9]), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn uniform_midpoints_against_dirac() {
        // Quantile-midpoint atoms of U[0,1]: mean exactly 1/2.
        let n = 1000;
        let atoms: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let u = m(&atoms);
        let d = m(&[0.0]);
        assert!((w1_via_cdf(&u, &d) - 0.5).abs() < 1e-12);
        assert!((wasserstein_p(&u, &d, 1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hminus1_diracs() {
        assert!((hminus1_distance(&m(&[0.0]), &m(&[1.0])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hminus1_shifted_uniforms() {
        let n = 20_000;
        let a: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        let h = hminus1_distance(&m(&a), &m(&b));
        let expected = (0.25f64 - 0.125 / 3.0).sqrt();
        assert!((h - expected).abs() < 1e-4, "{h} vs {expected}");
    }

    #[test]
    fn moments() {
        assert_eq!(m(&[2.0]).moment(3).unwrap(), 8.0);
        assert_eq!(m(&[-3.0, 0.0]).moment(1).unwrap(), -1.5);
        assert!(m(&[1.0]).moment(0).is_err());
        let n = 4000;
        let grid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!((m(&grid).moment(2).unwrap() - 1.0 / 3.0).abs() < 1e-7);
    }

    #[test]
    fn shift_distance_is_exact() {
        let a = Measure1D::from_samples(&[0.0, 0.25, 2.0], Some(&[0.5, 0.25, 0.25])).unwrap();
        let b = a.shifted(0.75).unwrap();
        for p in [1.0, 2.0, 3.0] {
            assert!((wasserstein_p(&a, &b, p).unwrap() - 0.75).abs() < 1e-15);
        }
    }

    #[test]
    fn mass_lookup() {
        let d = m(&[0.0, 0.0, 1.0, 2.0]);
        assert_eq!(d.mass_at(0.0), 0.5);
        assert_eq!(d.mass_at(0.5), 0.0);
    }
}

//! Discretized input measures and pushforwards through response functions.
//!
//! An input measure `ρ` on a box `Ω ⊂ Rᵈ` (d ≤ 3) is realized as a
//! [`ParameterQuadrature`]: nodes with positive weights summing to one. Any
//! [`Evaluable`] function pushed through those nodes yields a [`Measure1D`].
//! All integrals over `ρ` (`E_ρ`, `‖·‖_{L^q(ρ)}`) use the same quadrature, so
//! the surrogate error under study stays separate from discretization error.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::measure::Measure1D;
use crate::surrogates::jacobi::{gauss_legendre, gauss_nodes, weight_normalization, JacobiBasis};

/// Anything that maps a parameter point to a real response.
///
/// Implementations must be pure; nodes may be evaluated concurrently.
/// Failures are signalled with a non-finite return value.
pub trait Evaluable: Sync {
    fn eval(&self, x: &[f64]) -> f64;
}

impl<F> Evaluable for F
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Shared, thread-safe response function.
pub type ResponseFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Axis-aligned box `Π [lower_i, upper_i]` of dimension 1, 2 or 3.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ParameterBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch(lower.len(), upper.len()));
        }
        if !(1..=3).contains(&lower.len()) {
            return Err(Error::Unsupported(format!("box dimension {} (supported: 1..=3)", lower.len())));
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
                return Err(Error::invalid(format!("axis {i}: need finite lower < upper, got [{lo}, {hi}]")));
            }
        }
        Ok(ParameterBox { lower, upper })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    /// `[0, 1]ᵈ`.
    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| hi - lo).product()
    }

    /// Whether `x` lies inside the box enlarged by `tol` on every side.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(&v, (&lo, &hi))| v >= lo - tol && v <= hi + tol)
    }

    /// The `2ᵈ` corners of the box.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { self.upper[i] } else { self.lower[i] }).collect())
            .collect()
    }
}

/// Shape of an input density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightKind {
    Uniform,
    /// `k (1 − t)^{β₁} (1 + t)^{β₂}` with `t` the affine image of the interval on `[−1, 1]`.
    Jacobi { beta1: f64, beta2: f64 },
    Custom,
}

/// A probability density `r(α)` on a box, with its declared supremum `‖r‖_∞`.
#[derive(Clone)]
pub struct DensityWeight {
    kind: WeightKind,
    sup: f64,
    density: ResponseFn,
}

impl fmt::Debug for DensityWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityWeight").field("kind", &self.kind).field("sup", &self.sup).finish()
    }
}

impl DensityWeight {
    /// Uniform density `1 / vol(Ω)`.
    pub fn uniform(bbox: &ParameterBox) -> Self {
        let value = 1.0 / bbox.volume();
        DensityWeight { kind: WeightKind::Uniform, sup: value, density: Arc::new(move |_: &[f64]| value) }
    }

    /// Normalized Jacobi density on a one-dimensional box.
    pub fn jacobi(bbox: &ParameterBox, beta1: f64, beta2: f64) -> Result<Self> {
        if bbox.dim() != 1 {
            return Err(Error::Unsupported("Jacobi weights are one-dimensional".into()));
        }
        if !(beta1 > -1.0 && beta2 > -1.0) {
            return Err(Error::invalid(format!("Jacobi exponents must exceed -1, got ({beta1}, {beta2})")));
        }
        let (lo, hi) = (bbox.lower[0], bbox.upper[0]);
        let half = 0.5 * (hi - lo);
        let k = weight_normalization(beta1, beta2) / half;
        let density: ResponseFn = Arc::new(move |x: &[f64]| {
            let t = ((x[0] - lo) / half - 1.0).clamp(-1.0, 1.0);
            k * (1.0 - t).powf(beta1) * (1.0 + t).powf(beta2)
        });
        let sup = if beta1 < 0.0 || beta2 < 0.0 {
            f64::INFINITY
        } else if beta1 == 0.0 && beta2 == 0.0 {
            k
        } else {
            let t = (beta2 - beta1) / (beta1 + beta2);
            k * (1.0 - t).powf(beta1) * (1.0 + t).powf(beta2)
        };
        Ok(DensityWeight { kind: WeightKind::Jacobi { beta1, beta2 }, sup, density })
    }

    /// User-supplied density with a declared supremum. The normalization is
    /// checked against [`DensityWeight::reference_integral`] to `1e-8`.
    pub fn custom(bbox: &ParameterBox, density: ResponseFn, sup: f64) -> Result<Self> {
        if !(sup > 0.0) {
            return Err(Error::invalid(format!("declared density supremum must be positive, got {sup}")));
        }
        let w = DensityWeight { kind: WeightKind::Custom, sup, density };
        let mass = w.reference_integral(bbox);
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::invalid(format!("custom density integrates to {mass}, expected 1")));
        }
        Ok(w)
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    /// Declared `‖r‖_∞` (infinite for singular Jacobi weights).
    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        (self.density)(x)
    }

    /// `∫_Ω r dα` by tensor composite Gauss–Legendre (8-point panels).
    ///
    /// Jacobi weights use the exact Gauss–Jacobi rule instead, since their
    /// endpoint singularities defeat panel rules.
    pub fn reference_integral(&self, bbox: &ParameterBox) -> f64 {
        if let WeightKind::Jacobi { .. } = self.kind {
            // The weight is normalized analytically; a 1-node Gauss-Jacobi rule
            // integrates the constant 1 against it exactly.
            return 1.0;
        }
        let d = bbox.dim();
        let panels = match d {
            1 => 256,
            2 => 64,
            _ => 16,
        };
        let rule = gauss_legendre(8);
        let per_axis: Vec<Vec<(f64, f64)>> = (0..d)
            .map(|i| {
                let (lo, hi) = (bbox.lower[i], bbox.upper[i]);
                let h = (hi - lo) / panels as f64;
                (0..panels)
                    .flat_map(|p| {
                        let a = lo + p as f64 * h;
                        rule.nodes.iter().zip(&rule.weights).map(move |(&t, &w)| (a + 0.5 * h * (t + 1.0), w * h))
                    })
                    .collect()
            })
            .collect();
        let mut total = 0.0;
        let mut idx = vec![0usize; d];
        let mut point = vec![0.0; d];
        loop {
            let mut w = 1.0;
            for i in 0..d {
                let (x, wi) = per_axis[i][idx[i]];
                point[i] = x;
                w *= wi;
            }
            total += w * self.density(&point);
            if !advance(&mut idx, per_axis[0].len()) {
                break;
            }
        }
        total
    }
}

/// Odometer increment over a `d`-dimensional index with `n` values per axis.
/// The last axis varies fastest. Returns false after the final index.
fn advance(idx: &mut [usize], n: usize) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < n {
            return true;
        }
        idx[i] = 0;
    }
    false
}

/// How a [`ParameterQuadrature`] is generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureScheme {
    /// Tensor grid of `Mᵈ` cells, one node per cell midpoint.
    MidpointGrid,
    /// `M`-point Gauss rule for a one-dimensional Jacobi weight.
    GaussJacobi,
    /// `M` i.i.d. draws from `ρ` with equal weights. `stream` selects an
    /// independent ChaCha8 stream for the same seed.
    MonteCarlo { seed: u64, stream: u64 },
}

/// Nodes and probability weights discretizing `ρ` on a box.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterQuadrature {
    bbox: ParameterBox,
    /// Row-major node coordinates, `dim` values per node.
    points: Vec<f64>,
    weights: Vec<f64>,
    scheme: QuadratureScheme,
}

impl ParameterQuadrature {
    /// Quadrature from explicit nodes (row-major, `bbox.dim()` values each) and
    /// positive weights, renormalized to sum to one.
    pub fn from_nodes(bbox: ParameterBox, points: Vec<f64>, weights: Vec<f64>, scheme: QuadratureScheme) -> Result<Self> {
        let d = bbox.dim();
        if points.len() != weights.len() * d {
            return Err(Error::LengthMismatch(points.len(), weights.len() * d));
        }
        if weights.is_empty() {
            return Err(Error::Empty("quadrature needs at least one node"));
        }
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, &w)| !(w > 0.0 && w.is_finite())) {
            return Err(Error::NonPositiveWeight { index, value });
        }
        for node in points.chunks(d) {
            if !bbox.contains(node, 1e-12) {
                return Err(Error::OutOfDomain { point: node.to_vec() });
            }
        }
        let total: f64 = weights.iter().sum();
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(ParameterQuadrature { bbox, points, weights, scheme })
    }

    pub fn bbox(&self) -> &ParameterBox {
        &self.bbox
    }

    pub fn dim(&self) -> usize {
        self.bbox.dim()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.points[i * d..(i + 1) * d]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.dim())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    /// Evaluate `func` at every node, in node order.
    pub fn evaluate<F: Evaluable + ?Sized>(&self, func: &F, exec: Execution) -> Vec<f64> {
        exec::map_indexed(exec, self.len(), |i| func.eval(self.node(i)))
    }

    /// `Σ wᵢ h(nodeᵢ)`.
    pub fn integrate<F: Evaluable + ?Sized>(&self, func: &F) -> f64 {
        self.evaluate(func, Execution::default()).iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    fn check_finite(&self, values: &[f64]) -> Result<()> {
        match values.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(Error::NonFiniteAtNode { node: self.node(i).to_vec(), value: values[i] }),
            None => Ok(()),
        }
    }
}

/// Discretize `weight` on `bbox` with resolution `m` under `scheme`.
pub fn build_quadrature(
    bbox: &ParameterBox,
    weight: &DensityWeight,
    m: usize,
    scheme: QuadratureScheme,
) -> Result<ParameterQuadrature> {
    if m < 2 {
        return Err(Error::invalid(format!("quadrature resolution must be at least 2, got {m}")));
    }
    let d = bbox.dim();
    match scheme {
        QuadratureScheme::MidpointGrid => {
            let cells = m.checked_pow(d as u32).filter(|&c| c <= 200_000_000).ok_or_else(|| {
                Error::invalid(format!("{m}^{d} grid cells is too many"))
            })?;
            let steps: Vec<f64> = (0..d).map(|i| (bbox.upper[i] - bbox.lower[i]) / m as f64).collect();
            let cell_volume: f64 = steps.iter().product();
            let mut points = Vec::with_capacity(cells * d);
            let mut weights = Vec::with_capacity(cells);
            let mut idx = vec![0usize; d];
            let mut node = vec![0.0; d];
            loop {
                for i in 0..d {
                    node[i] = bbox.lower[i] + (idx[i] as f64 + 0.5) * steps[i];
                }
                let w = weight.density(&node) * cell_volume;
                if w > 0.0 {
                    points.extend_from_slice(&node);
                    weights.push(w);
                }
                if !advance(&mut idx, m) {
                    break;
                }
            }
            ParameterQuadrature::from_nodes(bbox.clone(), points, weights, scheme)
        }
        QuadratureScheme::GaussJacobi => {
            let (beta1, beta2) = match weight.kind {
                WeightKind::Jacobi { beta1, beta2 } if d == 1 => (beta1, beta2),
                WeightKind::Uniform if d == 1 => (0.0, 0.0),
                _ => {
                    return Err(Error::Unsupported(
                        "Gauss-Jacobi quadrature needs a one-dimensional Jacobi or uniform weight".into(),
                    ))
                }
            };
            let basis = JacobiBasis::new(beta1, beta2, m)?;
            let rule = gauss_nodes(&basis, m)?;
            let (lo, hi) = (bbox.lower[0], bbox.upper[0]);
            let points = rule.nodes.iter().map(|t| lo + 0.5 * (t + 1.0) * (hi - lo)).collect();
            ParameterQuadrature::from_nodes(bbox.clone(), points, rule.weights, scheme)
        }
        QuadratureScheme::MonteCarlo { seed, stream } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let points = sample_density(bbox, weight, m, &mut rng)?;
            ParameterQuadrature::from_nodes(bbox.clone(), points, vec![1.0; m], scheme)
        }
    }
}

/// Draw `n` i.i.d. points from `weight` on `bbox` (row-major coordinates).
pub fn sample_density<R: Rng + ?Sized>(bbox: &ParameterBox, weight: &DensityWeight, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let d = bbox.dim();
    let mut points = Vec::with_capacity(n * d);
    match weight.kind {
        WeightKind::Uniform => {
            for _ in 0..n {
                for i in 0..d {
                    points.push(bbox.lower[i] + rng.random::<f64>() * (bbox.upper[i] - bbox.lower[i]));
                }
            }
        }
        WeightKind::Jacobi { beta1, beta2 } => {
            // (1 + t)/2 ~ Beta(β₂ + 1, β₁ + 1) for t with density ∝ (1−t)^β₁ (1+t)^β₂.
            let beta = Beta::new(beta2 + 1.0, beta1 + 1.0).map_err(|e| Error::invalid(e.to_string()))?;
            let (lo, hi) = (bbox.lower[0], bbox.upper[0]);
            for _ in 0..n {
                let u: f64 = beta.sample(rng);
                points.push(lo + u * (hi - lo));
            }
        }
        WeightKind::Custom => {
            if !weight.sup.is_finite() {
                return Err(Error::Unsupported("rejection sampling needs a finite density supremum".into()));
            }
            let mut node = vec![0.0; d];
            let mut accepted = 0;
            while accepted < n {
                for (x, (lo, hi)) in node.iter_mut().zip(bbox.lower.iter().zip(&bbox.upper)) {
                    *x = lo + rng.random::<f64>() * (hi - lo);
                }
                if rng.random::<f64>() * weight.sup <= weight.density(&node) {
                    points.extend_from_slice(&node);
                    accepted += 1;
                }
            }
        }
    }
    Ok(points)
}

/// The pushforward `func_* ρ` of the discretized input measure.
pub fn pushforward<F: Evaluable + ?Sized>(func: &F, quad: &ParameterQuadrature) -> Result<Measure1D> {
    pushforward_with(func, quad, Execution::default())
}

pub fn pushforward_with<F: Evaluable + ?Sized>(func: &F, quad: &ParameterQuadrature, exec: Execution) -> Result<Measure1D> {
    let values = quad.evaluate(func, exec);
    pushforward_values(&values, quad)
}

/// Pushforward from precomputed node values.
pub fn pushforward_values(values: &[f64], quad: &ParameterQuadrature) -> Result<Measure1D> {
    if values.len() != quad.len() {
        return Err(Error::LengthMismatch(values.len(), quad.len()));
    }
    quad.check_finite(values)?;
    Measure1D::from_samples(values, Some(&quad.weights))
}

/// `‖f − g‖_{L^q(ρ)}` on the quadrature. `q = ∞` returns the node maximum,
/// which is a lower estimate of the true supremum.
pub fn lq_error<F, G>(f: &F, g: &G, quad: &ParameterQuadrature, q: f64) -> Result<f64>
where
    F: Evaluable + ?Sized,
    G: Evaluable + ?Sized,
{
    let fv = quad.evaluate(f, Execution::default());
    let gv = quad.evaluate(g, Execution::default());
    lq_error_values(&fv, &gv, quad, q)
}

/// [`lq_error`] from precomputed node values.
pub fn lq_error_values(fv: &[f64], gv: &[f64], quad: &ParameterQuadrature, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::invalid(format!("norm exponent must be >= 1, got {q}")));
    }
    if fv.len() != quad.len() || gv.len() != quad.len() {
        return Err(Error::LengthMismatch(fv.len().min(gv.len()), quad.len()));
    }
    quad.check_finite(fv)?;
    quad.check_finite(gv)?;
    let diffs = fv.iter().zip(gv).map(|(a, b)| (a - b).abs());
    if q.is_infinite() {
        return Ok(diffs.fold(0.0, f64::max));
    }
    let s: f64 = diffs.zip(&quad.weights).map(|(d, w)| w * d.powf(q)).sum();
    Ok(s.powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::wasserstein_p;

    fn unit_uniform(m: usize) -> ParameterQuadrature {
        let b = ParameterBox::unit(1).unwrap();
        build_quadrature(&b, &DensityWeight::uniform(&b), m, QuadratureScheme::MidpointGrid).unwrap()
    }

    #[test]
    fn box_validation() {
        assert!(ParameterBox::new(vec![0.0], vec![0.0]).is_err());
        assert!(ParameterBox::new(vec![0.0; 4], vec![1.0; 4]).is_err());
        assert!(ParameterBox::new(vec![0.0], vec![f64::INFINITY]).is_err());
        assert!(ParameterBox::new(vec![0.0, 1.0], vec![1.0]).is_err());
        let b = ParameterBox::new(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(b.volume(), 4.0);
        assert_eq!(b.vertices().len(), 4);
    }

    #[test]
    fn midpoint_two_cells() {
        let q = unit_uniform(2);
        assert_eq!(q.node(0), &[0.25]);
        assert_eq!(q.node(1), &[0.75]);
        assert_eq!(q.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn midpoint_square_grid() {
        let b = ParameterBox::unit(2).unwrap();
        let q = build_quadrature(&b, &DensityWeight::uniform(&b), 3, QuadratureScheme::MidpointGrid).unwrap();
        assert_eq!(q.len(), 9);
        for w in q.weights() {
            assert!((w - 1.0 / 9.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gauss_legendre_two_nodes() {
        let b = ParameterBox::interval(-1.0, 1.0).unwrap();
        let w = DensityWeight::jacobi(&b, 0.0, 0.0).unwrap();
        let q = build_quadrature(&b, &w, 2, QuadratureScheme::GaussJacobi).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((q.node(0)[0] + s).abs() < 1e-15 && (q.node(1)[0] - s).abs() < 1e-15);
        assert!((q.weights()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unsupported_combinations() {
        let b = ParameterBox::unit(2).unwrap();
        let w = DensityWeight::uniform(&b);
        assert!(matches!(build_quadrature(&b, &w, 4, QuadratureScheme::GaussJacobi), Err(Error::Unsupported(_))));
        assert!(build_quadrature(&b, &w, 1, QuadratureScheme::MidpointGrid).is_err());
        assert!(DensityWeight::jacobi(&b, 0.0, 0.0).is_err());
    }

    #[test]
    fn jacobi_weight_normalized() {
        let b = ParameterBox::interval(-1.0, 1.0).unwrap();
        for (b1, b2) in [(0.0, 0.0), (1.0, 2.0), (0.5, 0.5)] {
            let w = DensityWeight::jacobi(&b, b1, b2).unwrap();
            let q = build_quadrature(&b, &w, 20_000, QuadratureScheme::MidpointGrid).unwrap();
            // Raw midpoint mass before renormalization.
            let h = 2.0 / 20_000.0;
            let raw: f64 = q.nodes().map(|x| w.density(x) * h).sum();
            assert!((raw - 1.0).abs() < 1e-6, "({b1},{b2}) -> {raw}");
        }
        let w = DensityWeight::jacobi(&b, 1.0, 1.0).unwrap();
        assert!((w.sup() - 0.75).abs() < 1e-14);
    }

    #[test]
    fn custom_weight_checked() {
        let b = ParameterBox::unit(1).unwrap();
        let good = DensityWeight::custom(&b, Arc::new(|x: &[f64]| 2.0 * x[0]), 2.0).unwrap();
        assert!((good.reference_integral(&b) - 1.0).abs() < 1e-12);
        assert!(DensityWeight::custom(&b, Arc::new(|x: &[f64]| x[0]), 1.0).is_err());
        let b2 = ParameterBox::unit(2).unwrap();
        let prod = DensityWeight::custom(&b2, Arc::new(|x: &[f64]| 4.0 * x[0] * x[1]), 4.0).unwrap();
        assert_eq!(prod.kind(), WeightKind::Custom);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let b = ParameterBox::unit(2).unwrap();
        let w = DensityWeight::uniform(&b);
        let s = QuadratureScheme::MonteCarlo { seed: 7, stream: 3 };
        let a = build_quadrature(&b, &w, 100, s).unwrap();
        let c = build_quadrature(&b, &w, 100, s).unwrap();
        assert_eq!(a, c);
        let other = build_quadrature(&b, &w, 100, QuadratureScheme::MonteCarlo { seed: 7, stream: 4 }).unwrap();
        assert_ne!(a, other);
        assert!(a.nodes().all(|x| b.contains(x, 0.0)));
    }

    #[test]
    fn monte_carlo_jacobi_mean() {
        let b = ParameterBox::interval(-1.0, 1.0).unwrap();
        // Weight ∝ (1+t)²: mean of t is 1/2.
        let w = DensityWeight::jacobi(&b, 0.0, 2.0).unwrap();
        let q = build_quadrature(&b, &w, 200_000, QuadratureScheme::MonteCarlo { seed: 1, stream: 0 }).unwrap();
        let mean = q.integrate(&|x: &[f64]| x[0]);
        assert!((mean - 0.5).abs() < 5e-3, "{mean}");
    }

    #[test]
    fn oscillator_pushforward() {
        let b = ParameterBox::interval(1.0, 2.0).unwrap();
        let q = build_quadrature(&b, &DensityWeight::uniform(&b), 4000, QuadratureScheme::MidpointGrid).unwrap();
        let mu = pushforward(&|v: &[f64]| v[0] * v[0], &q).unwrap();
        assert!((mu.mean() - 7.0 / 3.0).abs() < 1e-7);
        assert!(mu.min() > 1.0 && mu.max() < 4.0);
    }

    #[test]
    fn constant_pushforward_is_dirac() {
        let q = unit_uniform(50);
        let mu = pushforward(&|_: &[f64]| 3.5, &q).unwrap();
        assert_eq!(mu.atoms(), &[3.5]);
        assert_eq!(mu.weights(), &[1.0]);
    }

    #[test]
    fn identity_pushforward_close_to_uniform() {
        let q = unit_uniform(4000);
        let mu = pushforward(&|x: &[f64]| x[0], &q).unwrap();
        let reference: Vec<f64> = (0..100_000).map(|i| (i as f64 + 0.5) / 100_000.0).collect();
        let w = wasserstein_p(&mu, &Measure1D::uniform(&reference).unwrap(), 1.0).unwrap();
        assert!(w <= 1e-3, "{w}");
    }

    #[test]
    fn non_finite_reports_node() {
        let q = unit_uniform(4);
        let err = pushforward(&|x: &[f64]| if x[0] > 0.5 { f64::NAN } else { x[0] }, &q).unwrap_err();
        match err {
            Error::NonFiniteAtNode { node, .. } => assert_eq!(node, vec![0.625]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lq_errors() {
        let q = unit_uniform(4000);
        let f = |x: &[f64]| x[0];
        let zero = |_: &[f64]| 0.0;
        for norm in [1.0, 2.0, f64::INFINITY] {
            assert_eq!(lq_error(&f, &f, &q, norm).unwrap(), 0.0);
        }
        assert!((lq_error(&f, &zero, &q, 1.0).unwrap() - 0.5).abs() < 1e-4);
        assert!(lq_error(&f, &zero, &q, 0.5).is_err());
        let delta = 1e-3;
        let g = move |x: &[f64]| x[0] + delta * (x[0] / (10.0 * delta)).sin();
        let e = lq_error(&f, &g, &q, f64::INFINITY).unwrap();
        assert!((e - delta).abs() < 1e-6, "{e}");
    }

    #[test]
    fn parallel_and_sequential_pushforwards_identical() {
        let q = unit_uniform(10_000);
        let f = |x: &[f64]| (7.0 * x[0]).sin();
        let a = pushforward_with(&f, &q, Execution::Parallel).unwrap();
        let b = pushforward_with(&f, &q, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }
}

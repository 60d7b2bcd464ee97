//! Upper and lower bounds on `W_p(f_*ρ, g_*ρ)` in terms of `f − g`.
//!
//! Upper bounds: `W_p ≤ ‖f−g‖_∞`, `W_p ≤ ‖f−g‖_{L^p(ρ)}` and the interpolated
//! `W_p ≤ C(p,q) ‖f−g‖_∞^{p/(p+q)} ‖f−g‖_q^{q/(p+q)}`. Lower bounds:
//! `|E f − E g| ≤ W_1` and, for monotone rearrangements with slopes above `τ`,
//! `A_k |E f^k − E g^k| ≤ W_2`.
//!
//! All norms, expectations and distances use one [`ParameterQuadrature`], so
//! the upper bounds hold exactly on the discrete measures up to rounding.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measure::{hminus1_distance, wasserstein_p, Measure1D};
use crate::pushforward::{lq_error_values, pushforward_values, DensityWeight, Evaluable, ParameterQuadrature};

/// Slack added to every bound comparison in reports.
pub const DEFAULT_SLACK: f64 = 1e-3;

/// Flat runs of the rearrangement heavier than this violate the slope hypothesis.
pub const FLAT_RUN_WEIGHT: f64 = 1e-6;

/// `C(p, q) = ((p/q)^{q/(p+q)} + (q/p)^{p/(p+q)})^{1/p}`, the constant obtained
/// by optimizing the splitting radius in the interpolated bound.
pub fn interpolation_constant(p: f64, q: f64) -> f64 {
    let s = p + q;
    ((p / q).powf(q / s) + (q / p).powf(p / s)).powf(1.0 / p)
}

/// `C(p,q) · sup^{p/(p+q)} · lq^{q/(p+q)}`.
pub fn interpolated_bound(p: f64, q: f64, sup_norm: f64, lq_norm: f64) -> f64 {
    let s = p + q;
    interpolation_constant(p, q) * sup_norm.powf(p / s) * lq_norm.powf(q / s)
}

/// Nonincreasing rearrangement `f*` on `[0, 1]` of a function sampled on a
/// probability quadrature.
///
/// `f*(s) = values[i]` for `s ∈ [breakpoints[i], breakpoints[i+1])`; tied node
/// values are merged, so `values` is strictly decreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct RearrangedFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    /// Number of nodes merged into each value.
    multiplicity: Vec<usize>,
}

impl RearrangedFunction {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mass carried by each value.
    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.windows(2).map(|w| w[1] - w[0])
    }

    /// `f*(s)` for `s ∈ [0, 1]`.
    pub fn value_at(&self, s: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= s).saturating_sub(1);
        self.values[i.min(self.values.len() - 1)]
    }

    /// `(∫₀¹ |f*|^p ds)^{1/p}`.
    pub fn norm(&self, p: f64) -> f64 {
        let s: f64 = self.weights().zip(&self.values).map(|(w, v)| w * v.abs().powf(p)).sum();
        s.powf(1.0 / p)
    }
}

/// Rearrange `f` sampled on `quad` into nonincreasing order.
pub fn rearrange_decreasing<F: Evaluable + ?Sized>(f: &F, quad: &ParameterQuadrature) -> Result<RearrangedFunction> {
    let values = quad.evaluate(f, Execution::default());
    rearrange_values(&values, quad.weights())
}

/// [`rearrange_decreasing`] from node values and probability weights.
pub fn rearrange_values(values: &[f64], weights: &[f64]) -> Result<RearrangedFunction> {
    if values.len() != weights.len() {
        return Err(Error::LengthMismatch(values.len(), weights.len()));
    }
    if values.is_empty() {
        return Err(Error::Empty("rearrangement of an empty quadrature"));
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index, value: values[index] });
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let total: f64 = weights.iter().sum();
    let mut breakpoints = vec![0.0];
    let mut out_values: Vec<f64> = Vec::new();
    let mut multiplicity = Vec::new();
    let mut acc = 0.0;
    for &i in &order {
        acc += weights[i] / total;
        if out_values.last() == Some(&values[i]) {
            *breakpoints.last_mut().unwrap() = acc;
            *multiplicity.last_mut().unwrap() += 1;
        } else {
            out_values.push(values[i]);
            breakpoints.push(acc);
            multiplicity.push(1);
        }
    }
    *breakpoints.last_mut().unwrap() = 1.0;
    Ok(RearrangedFunction { breakpoints, values: out_values, multiplicity })
}

/// Minimum secant slope `|Δv / Δs|` of `f*` between midpoints of consecutive
/// value intervals. Zero signals a violated hypothesis: fewer than two
/// values, or tied nodes carrying more than [`FLAT_RUN_WEIGHT`].
pub fn estimate_tau(rf: &RearrangedFunction) -> f64 {
    if rf.values.len() < 2 {
        return 0.0;
    }
    let weights: Vec<f64> = rf.weights().collect();
    if weights.iter().zip(&rf.multiplicity).any(|(&w, &m)| m >= 2 && w > FLAT_RUN_WEIGHT) {
        return 0.0;
    }
    let mids: Vec<f64> = rf.breakpoints.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    (0..rf.values.len() - 1)
        .map(|i| (rf.values[i] - rf.values[i + 1]).abs() / (mids[i + 1] - mids[i]))
        .fold(f64::INFINITY, f64::min)
}

/// Range data and slope bound entering `A_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentHypothesis {
    /// `max(f, g)` over nodes and box vertices.
    pub upper: f64,
    /// `min(f, g)` over nodes and box vertices.
    pub lower: f64,
    pub tau: f64,
    pub density_sup: f64,
}

impl MomentHypothesis {
    /// Gather `M`, `m`, `τ` for the pair; errors when `τ = 0`, the density is
    /// unbounded, or the range is degenerate.
    fn gather(fv: &[f64], gv: &[f64], vertex_values: &[f64], quad: &ParameterQuadrature, weight: &DensityWeight) -> Result<Self> {
        let tau_f = estimate_tau(&rearrange_values(fv, quad.weights())?);
        let tau_g = estimate_tau(&rearrange_values(gv, quad.weights())?);
        let tau = tau_f.min(tau_g);
        if !(tau > 0.0) {
            return Err(Error::Hypothesis(format!("rearranged slope bound tau is zero (f: {tau_f}, g: {tau_g})")));
        }
        let density_sup = weight.sup();
        if !density_sup.is_finite() {
            return Err(Error::Hypothesis("input density is unbounded".into()));
        }
        let all = fv.iter().chain(gv).chain(vertex_values.iter().filter(|v| v.is_finite()));
        let (lower, upper) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if !(upper > lower) {
            return Err(Error::Hypothesis(format!("degenerate range [{lower}, {upper}]")));
        }
        Ok(MomentHypothesis { upper, lower, tau, density_sup })
    }

    /// `A_k = (√(2k−1)/k) (M^{2k−1} − m^{2k−1})^{−1/2} τ^{1/2} ‖r‖_∞^{−1/2}`.
    pub fn a_k(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(Error::invalid("moment order k must be at least 1"));
        }
        let e = 2 * k as i32 - 1;
        let range = self.upper.powi(e) - self.lower.powi(e);
        if !(range > 0.0) {
            return Err(Error::Hypothesis(format!("M^{e} - m^{e} = {range} is not positive")));
        }
        let kf = k as f64;
        Ok((2.0 * kf - 1.0).sqrt() / kf * range.powf(-0.5) * self.tau.sqrt() / self.density_sup.sqrt())
    }
}

fn vertex_values<F: Evaluable + ?Sized>(f: &F, quad: &ParameterQuadrature) -> Vec<f64> {
    quad.bbox().vertices().iter().map(|v| f.eval(v)).collect()
}

/// `A_k` for the pair `(f, g)`.
///
/// `M` and `m` range over the quadrature nodes and the box vertices, so a
/// monotone pair attains its true extremes on the closed box.
pub fn a_k_coefficient<F, G>(f: &F, g: &G, quad: &ParameterQuadrature, weight: &DensityWeight, k: u32) -> Result<f64>
where
    F: Evaluable + ?Sized,
    G: Evaluable + ?Sized,
{
    let fv = quad.evaluate(f, Execution::default());
    let gv = quad.evaluate(g, Execution::default());
    let mut vv = vertex_values(f, quad);
    vv.extend(vertex_values(g, quad));
    MomentHypothesis::gather(&fv, &gv, &vv, quad, weight)?.a_k(k)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpolatedBound {
    pub q: f64,
    pub constant: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentBound {
    pub k: u32,
    pub a_k: f64,
    /// `|E f^k − E g^k|`.
    pub moment_gap: f64,
    pub value: f64,
}

/// `W_p` with every applicable bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub p: f64,
    pub w_p: f64,
    pub upper_inf: f64,
    pub upper_lp: f64,
    pub upper_interp: Vec<InterpolatedBound>,
    /// `|E f − E g|`, present for `p = 1`.
    pub lower_mean: Option<f64>,
    /// Present for `p = 2` when the slope hypothesis holds.
    pub lower_moments: Vec<MomentBound>,
    pub lower_moments_omitted: Option<String>,
    pub hypothesis: Option<MomentHypothesis>,
    pub slack: f64,
}

/// One comparison `lhs ≤ rhs + slack` from a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundReport {
    /// Every sandwich inequality the report asserts.
    pub fn checks(&self) -> Vec<BoundCheck> {
        let check = |name: String, lhs: f64, rhs: f64| BoundCheck { name, lhs, rhs, holds: lhs <= rhs + self.slack };
        let mut out = vec![
            check("W_p <= |f-g|_inf".into(), self.w_p, self.upper_inf),
            check(format!("W_p <= |f-g|_{}", self.p), self.w_p, self.upper_lp),
        ];
        for b in &self.upper_interp {
            out.push(check(format!("W_p <= C(p,{})-interpolated", b.q), self.w_p, b.value));
        }
        if let Some(lm) = self.lower_mean {
            out.push(check("|Ef-Eg| <= W_1".into(), lm, self.w_p));
        }
        for m in &self.lower_moments {
            out.push(check(format!("A_{k}|Ef^{k}-Eg^{k}| <= W_2", k = m.k), m.value, self.w_p));
        }
        out
    }

    pub fn all_hold(&self) -> bool {
        self.checks().iter().all(|c| c.holds)
    }
}

/// Evaluate `W_p(f_*ρ, g_*ρ)` and all bounds on one quadrature.
///
/// `q_list` selects the interpolated bounds; `k_max` the moment bounds
/// (used only when `p = 2`).
pub fn bound_report<F, G>(
    f: &F,
    g: &G,
    quad: &ParameterQuadrature,
    weight: &DensityWeight,
    p: f64,
    q_list: &[f64],
    k_max: u32,
) -> Result<BoundReport>
where
    F: Evaluable + ?Sized,
    G: Evaluable + ?Sized,
{
    let fv = quad.evaluate(f, Execution::default());
    let gv = quad.evaluate(g, Execution::default());
    let mut vv = vertex_values(f, quad);
    vv.extend(vertex_values(g, quad));
    bound_report_values(&fv, &gv, &vv, quad, weight, p, q_list, k_max)
}

/// [`bound_report`] from precomputed node values and box-vertex values.
#[allow(clippy::too_many_arguments)]
pub fn bound_report_values(
    fv: &[f64],
    gv: &[f64],
    vertex_values: &[f64],
    quad: &ParameterQuadrature,
    weight: &DensityWeight,
    p: f64,
    q_list: &[f64],
    k_max: u32,
) -> Result<BoundReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::invalid(format!("order p must be finite and >= 1, got {p}")));
    }
    let mu = pushforward_values(fv, quad)?;
    let nu = pushforward_values(gv, quad)?;
    let w_p = wasserstein_p(&mu, &nu, p)?;
    let upper_inf = lq_error_values(fv, gv, quad, f64::INFINITY)?;
    let upper_lp = lq_error_values(fv, gv, quad, p)?;
    let upper_interp = q_list
        .iter()
        .map(|&q| {
            let lq = lq_error_values(fv, gv, quad, q)?;
            Ok(InterpolatedBound { q, constant: interpolation_constant(p, q), value: interpolated_bound(p, q, upper_inf, lq) })
        })
        .collect::<Result<Vec<_>>>()?;
    let lower_mean = (p == 1.0).then(|| (mu.mean() - nu.mean()).abs());

    let (mut lower_moments, mut lower_moments_omitted, mut hypothesis) = (Vec::new(), None, None);
    if p == 2.0 && k_max > 0 {
        match MomentHypothesis::gather(fv, gv, vertex_values, quad, weight) {
            Ok(h) => {
                for k in 1..=k_max {
                    let a_k = h.a_k(k)?;
                    let moment_gap = (mu.moment(k)? - nu.moment(k)?).abs();
                    lower_moments.push(MomentBound { k, a_k, moment_gap, value: a_k * moment_gap });
                }
                hypothesis = Some(h);
            }
            Err(Error::Hypothesis(reason)) => lower_moments_omitted = Some(reason),
            Err(e) => return Err(e),
        }
    } else if k_max > 0 {
        lower_moments_omitted = Some(format!("moment bounds apply to p = 2 only (p = {p})"));
    }

    Ok(BoundReport {
        p,
        w_p,
        upper_inf,
        upper_lp,
        upper_interp,
        lower_mean,
        lower_moments,
        lower_moments_omitted,
        hypothesis,
        slack: DEFAULT_SLACK,
    })
}

/// `max(sup p_μ, sup p_ν)^{1/2} W_2(μ, ν) − ‖μ − ν‖_{Ḣ⁻¹}`, nonnegative up
/// to discretization error when both measures have bounded densities.
pub fn loeper_peyre_residual(mu: &Measure1D, nu: &Measure1D, pdf_sup_mu: f64, pdf_sup_nu: f64) -> Result<f64> {
    for s in [pdf_sup_mu, pdf_sup_nu] {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::invalid(format!("density bound must be positive and finite, got {s}")));
        }
    }
    let w2 = wasserstein_p(mu, nu, 2.0)?;
    Ok(pdf_sup_mu.max(pdf_sup_nu).sqrt() * w2 - hminus1_distance(mu, nu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pushforward::{build_quadrature, ParameterBox, QuadratureScheme};

    fn unit(m: usize) -> (ParameterQuadrature, DensityWeight) {
        let b = ParameterBox::unit(1).unwrap();
        let w = DensityWeight::uniform(&b);
        (build_quadrature(&b, &w, m, QuadratureScheme::MidpointGrid).unwrap(), w)
    }

    #[test]
    fn constant_values() {
        assert!((interpolation_constant(1.0, 1.0) - 2.0).abs() < 1e-15);
        assert!((interpolation_constant(2.0, 2.0) - 2f64.sqrt()).abs() < 1e-15);
        // Brute-force minimum of r^p + A^p B^q r^{-q} over r.
        for (p, q) in [(1.0, 2.0), (3.0, 1.0), (2.0, 4.0)] {
            let (a, b): (f64, f64) = (0.7, 0.2);
            let best = (1..200_000)
                .map(|i| i as f64 * 1e-5)
                .map(|r: f64| r.powf(p) + a.powf(p) * b.powf(q) * r.powf(-q))
                .fold(f64::INFINITY, f64::min)
                .powf(1.0 / p);
            assert!((interpolated_bound(p, q, a, b) - best).abs() < 1e-6, "({p},{q})");
        }
    }

    #[test]
    fn rearrangement_of_identity() {
        let (q, _) = unit(1000);
        let rf = rearrange_decreasing(&|x: &[f64]| x[0], &q).unwrap();
        for s in [0.1, 0.5, 0.9] {
            assert!((rf.value_at(s) - (1.0 - s)).abs() < 1e-3);
        }
        assert!(rf.values().windows(2).all(|w| w[0] > w[1]));
        assert!((estimate_tau(&rf) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rearrangement_of_constant() {
        let (q, _) = unit(100);
        let rf = rearrange_decreasing(&|_: &[f64]| 4.0, &q).unwrap();
        assert_eq!(rf.values(), &[4.0]);
        assert_eq!(rf.value_at(0.3), 4.0);
        assert_eq!(estimate_tau(&rf), 0.0);
    }

    #[test]
    fn rearrangement_preserves_norms() {
        let (q, _) = unit(4000);
        let f = |x: &[f64]| 5.0 * (1.0 + x[0] * (10.0 * x[0]).sin() * (-x[0] * x[0]).exp());
        let rf = rearrange_decreasing(&f, &q).unwrap();
        for p in [1.0, 2.0, 4.0] {
            let direct = q.integrate(&|x: &[f64]| f(x).abs().powf(p)).powf(1.0 / p);
            assert!((direct - rf.norm(p)).abs() < 1e-6);
        }
    }

    #[test]
    fn tau_of_linear_functions() {
        let (q, _) = unit(4000);
        let t3 = estimate_tau(&rearrange_decreasing(&|x: &[f64]| 3.0 * x[0] - 3.0, &q).unwrap());
        let t2 = estimate_tau(&rearrange_decreasing(&|x: &[f64]| 2.0 * x[0] - 2.0, &q).unwrap());
        assert!((t3 - 3.0).abs() < 1e-8 && (t2 - 2.0).abs() < 1e-8);
    }

    #[test]
    fn tau_detects_plateau() {
        let (q, _) = unit(1000);
        let f = |x: &[f64]| if x[0] < 0.5 { x[0] } else { 0.5 };
        assert_eq!(estimate_tau(&rearrange_decreasing(&f, &q).unwrap()), 0.0);
    }

    #[test]
    fn worked_linear_pair() {
        let (q, w) = unit(4000);
        let f = |x: &[f64]| 3.0 * x[0] - 3.0;
        let g = |x: &[f64]| 2.0 * x[0] - 2.0;
        let a1 = a_k_coefficient(&f, &g, &q, &w, 1).unwrap();
        assert!((a1 - (2.0f64 / 3.0).sqrt()).abs() < 1e-6, "{a1}");
        let a2 = a_k_coefficient(&f, &g, &q, &w, 2).unwrap();
        let want = 3f64.sqrt() / 2.0 * 3f64.powf(-1.5) * 2f64.sqrt();
        assert!((a2 - want).abs() < 1e-6);
        let r = bound_report(&f, &g, &q, &w, 2.0, &[1.0, 2.0], 5).unwrap();
        assert_eq!(r.lower_moments.len(), 5);
        assert!(r.all_hold(), "{:#?}", r.checks());
    }

    #[test]
    fn flat_pair_has_no_a_k() {
        let (q, w) = unit(100);
        let err = a_k_coefficient(&|x: &[f64]| x[0], &|_: &[f64]| 1.0, &q, &w, 1).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
        let r = bound_report(&|x: &[f64]| x[0], &|_: &[f64]| 1.0, &q, &w, 2.0, &[], 3).unwrap();
        assert!(r.lower_moments.is_empty() && r.lower_moments_omitted.is_some());
    }

    #[test]
    fn sharp_constant_shift() {
        let (q, w) = unit(50);
        let r = bound_report(&|_: &[f64]| 0.0, &|_: &[f64]| 2.0, &q, &w, 3.0, &[1.0, 2.0, 4.0], 0).unwrap();
        assert!((r.w_p - 2.0).abs() < 1e-14);
        assert!((r.upper_inf - 2.0).abs() < 1e-14 && (r.upper_lp - 2.0).abs() < 1e-14);
        assert!(r.all_hold());
    }

    #[test]
    fn equality_chain_for_ordered_pair() {
        let (q, w) = unit(4000);
        let r = bound_report(&|x: &[f64]| x[0], &|_: &[f64]| 0.0, &q, &w, 1.0, &[2.0], 0).unwrap();
        assert!((r.lower_mean.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.w_p - 0.5).abs() < 1e-12);
        assert!((r.upper_lp - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_pair_gives_zeros() {
        let (q, w) = unit(200);
        let f = |x: &[f64]| x[0] * x[0];
        let r = bound_report(&f, &f, &q, &w, 1.0, &[1.0, 4.0], 0).unwrap();
        assert_eq!((r.w_p, r.upper_inf, r.upper_lp, r.lower_mean), (0.0, 0.0, 0.0, Some(0.0)));
        assert!(r.upper_interp.iter().all(|b| b.value == 0.0));
    }

    #[test]
    fn loeper_peyre_shifted_uniforms() {
        let a: Vec<f64> = (0..20_000).map(|i| (i as f64 + 0.5) / 20_000.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        let (mu, nu) = (Measure1D::uniform(&a).unwrap(), Measure1D::uniform(&b).unwrap());
        let r = loeper_peyre_residual(&mu, &nu, 1.0, 1.0).unwrap();
        assert!((r - (0.5 - (0.25f64 - 0.125 / 3.0).sqrt())).abs() < 1e-4, "{r}");
        assert_eq!(loeper_peyre_residual(&mu, &mu, 1.0, 1.0).unwrap(), 0.0);
        assert!(loeper_peyre_residual(&mu, &nu, 0.0, 1.0).is_err());
    }
}

//! Single-shot bound audit of one `(f, g)` pair.

use serde::Serialize;

use super::config::{BoundsSpec, SurrogateSpec};
use super::convergence::Reference;
use super::problems::Problem;
use crate::bounds::{bound_report, BoundCheck, BoundReport};
use crate::density::DEFAULT_GRID_POINTS;
use crate::error::Result;
use crate::exec::Execution;
use crate::pushforward::{Evaluable, ResponseFn};
use crate::surrogates::SurrogateModel;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditOutcome {
    pub problem: String,
    /// `"g"` for a fixed partner, otherwise the surrogate kind and node count.
    pub partner: String,
    pub reference_resolution: usize,
    pub report: BoundReport,
    pub checks: Vec<BoundCheck>,
    /// `sup |p_μ − p_ν|` on a shared grid, when both densities exist.
    pub pdf_sup_gap: Option<f64>,
    pub pdf_sup_gap_omitted: Option<String>,
}

enum Partner {
    Fixed(ResponseFn),
    Surrogate(SurrogateModel),
}

impl Evaluable for Partner {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Partner::Fixed(g) => g(x),
            Partner::Surrogate(s) => s.eval(x),
        }
    }
}

/// Bound report for the problem's fixed `g`, or for the surrogate at the
/// largest sweep point.
pub fn audit_bounds(problem: &Problem, surrogate: &SurrogateSpec, bounds: &BoundsSpec, m: usize, exec: Execution) -> Result<AuditOutcome> {
    let (partner, label) = match &problem.g {
        Some(g) => (Partner::Fixed(g.clone()), "g".to_string()),
        None => {
            let n = *surrogate.sweep()?.last().expect("sweep is nonempty");
            let kind = serde_json::to_value(surrogate.kind).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            (Partner::Surrogate(problem.fit_surrogate(surrogate, n)?), format!("{kind}(N={n})"))
        }
    };
    let reference = Reference::new(problem, m, exec)?;
    let report = bound_report(problem.f.as_ref(), &partner, reference.quadrature(), &problem.weight, bounds.p, &bounds.q_list, bounds.k_max)?;
    let (pdf_sup_gap, pdf_sup_gap_omitted) = match reference.densities(&partner, DEFAULT_GRID_POINTS) {
        Ok((pf, pg)) => {
            let gap = pf.values().iter().zip(pg.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            (Some(gap), None)
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let checks = report.checks();
    Ok(AuditOutcome {
        problem: problem.name.clone(),
        partner: label,
        reference_resolution: m,
        report,
        checks,
        pdf_sup_gap,
        pdf_sup_gap_omitted,
    })
}

impl AuditOutcome {
    /// One human-readable verdict per inequality, then the density contrast.
    pub fn verdict_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("problem {} vs {}: W_{} = {:.6e}", self.problem, self.partner, self.report.p, self.report.w_p)];
        for c in &self.checks {
            let tag = if c.holds { "PASS" } else { "FAIL" };
            lines.push(format!("[{tag}] {}: {:.6e} <= {:.6e} + {:.0e}", c.name, c.lhs, c.rhs, self.report.slack));
        }
        if let Some(reason) = &self.report.lower_moments_omitted {
            lines.push(format!("moment lower bounds omitted: {reason}"));
        }
        match (self.pdf_sup_gap, &self.pdf_sup_gap_omitted) {
            (Some(gap), _) => lines.push(format!("density contrast: sup|p_mu - p_nu| = {gap:.6e}")),
            (None, Some(reason)) => lines.push(format!("density contrast unavailable: {reason}")),
            (None, None) => {}
        }
        lines
    }
}

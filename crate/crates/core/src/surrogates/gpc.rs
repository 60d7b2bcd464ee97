use super::jacobi::{gauss_nodes, JacobiBasis};
use crate::error::{Error, Result};
use crate::pushforward::Evaluable;

/// Collocation polynomial `Σ_{n<N} f̂_N(n) p_n(t)` on `[lo, hi]`, where
/// `t ∈ [−1, 1]` is the affine image of `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct GpcModel {
    basis: JacobiBasis,
    coeffs: Vec<f64>,
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
}

/// Interpolate `f` at the `n` Gauss nodes of `basis` mapped onto `[lo, hi]`.
///
/// Coefficients are the discrete projections `f̂_N(k) = Σ_j f(α_j) p_k(t_j) w_j`,
/// which make the polynomial the unique interpolant at the nodes.
pub fn fit_gpc_collocation<F: Evaluable + ?Sized>(f: &F, basis: &JacobiBasis, n: usize, lo: f64, hi: f64) -> Result<GpcModel> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(format!("invalid interval [{lo}, {hi}]")));
    }
    let basis = if basis.max_degree() >= n { basis.clone() } else { JacobiBasis::new(basis.beta1(), basis.beta2(), n)? };
    let rule = gauss_nodes(&basis, n)?;
    let to_alpha = |t: f64| lo + 0.5 * (t + 1.0) * (hi - lo);
    let mut coeffs = vec![0.0; n];
    let mut nodes = Vec::with_capacity(n);
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let alpha = to_alpha(t);
        let v = f.eval(&[alpha]);
        if !v.is_finite() {
            return Err(Error::NonFiniteAtNode { node: vec![alpha], value: v });
        }
        for (c, p) in coeffs.iter_mut().zip(basis.eval_all(t, n - 1)) {
            *c += v * p * w;
        }
        nodes.push(alpha);
    }
    Ok(GpcModel { basis, coeffs, lo, hi, nodes })
}

impl GpcModel {
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Collocation nodes in `α` coordinates.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn to_reference(&self, alpha: f64) -> f64 {
        (2.0 * (alpha - self.lo) / (self.hi - self.lo) - 1.0).clamp(-1.0, 1.0)
    }

    pub fn value(&self, alpha: f64) -> f64 {
        self.basis.clenshaw(&self.coeffs, self.to_reference(alpha))
    }

    /// `d/dα` of the polynomial.
    pub fn derivative(&self, alpha: f64) -> f64 {
        let t = self.to_reference(alpha);
        let (mut p_prev, mut p, mut d_prev, mut d) = (0.0, 1.0, 0.0, 0.0);
        let mut total = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            total += c * d;
            if k + 1 == self.coeffs.len() {
                break;
            }
            let (a, s_k) = self.basis.recurrence(k);
            let (_, s_next) = self.basis.recurrence(k + 1);
            let p_next = ((t - a) * p - s_k * p_prev) / s_next;
            let d_next = (p + (t - a) * d - s_k * d_prev) / s_next;
            (p_prev, p, d_prev, d) = (p, p_next, d, d_next);
        }
        total * 2.0 / (self.hi - self.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_single_coefficient() {
        let m = fit_gpc_collocation(&|_: &[f64]| 1.0, &JacobiBasis::legendre(10), 8, -1.0, 1.0).unwrap();
        assert!((m.coefficients()[0] - 1.0).abs() < 1e-12);
        assert!(m.coefficients()[1..].iter().all(|c| c.abs() < 1e-12));
        assert!((m.value(0.123) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polynomial_reproduced_exactly() {
        let f = |x: &[f64]| 1.0 - 2.0 * x[0] + 0.5 * x[0].powi(4) - x[0].powi(5);
        for basis in [JacobiBasis::legendre(6), JacobiBasis::chebyshev(6), JacobiBasis::new(1.0, 2.5, 6).unwrap()] {
            let m = fit_gpc_collocation(&f, &basis, 6, 0.0, 2.0).unwrap();
            for i in 0..=50 {
                let a = 2.0 * i as f64 / 50.0;
                assert!((m.value(a) - f(&[a])).abs() < 1e-11, "{a}");
            }
        }
    }

    #[test]
    fn interpolates_at_nodes() {
        let f = |x: &[f64]| 0.5 * x[0] + (9.0 * x[0]).tanh();
        let m = fit_gpc_collocation(&f, &JacobiBasis::legendre(40), 40, -1.0, 1.0).unwrap();
        for &a in m.nodes() {
            let want = f(&[a]);
            assert!((m.value(a) - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let f = |x: &[f64]| (2.0 * x[0]).sin();
        let m = fit_gpc_collocation(&f, &JacobiBasis::legendre(20), 20, -1.0, 3.0).unwrap();
        for a in [-0.5, 0.0, 1.3, 2.7] {
            let h = 1e-6;
            let fd = (m.value(a + h) - m.value(a - h)) / (2.0 * h);
            assert!((m.derivative(a) - fd).abs() < 1e-7);
            assert!((m.derivative(a) - 2.0 * (2.0 * a).cos()).abs() < 1e-6);
        }
    }

    #[test]
    fn grows_basis_when_needed() {
        let m = fit_gpc_collocation(&|x: &[f64]| x[0], &JacobiBasis::legendre(2), 5, -1.0, 1.0).unwrap();
        assert_eq!(m.coefficients().len(), 5);
        assert!((m.value(0.4) - 0.4).abs() < 1e-14);
    }

    #[test]
    fn reports_failing_node() {
        let err = fit_gpc_collocation(&|x: &[f64]| 1.0 / x[0], &JacobiBasis::legendre(3), 3, -1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::NonFiniteAtNode { .. }));
    }
}

//! Orthonormal Jacobi polynomials and their Gauss quadrature rules.
//!
//! The polynomials are orthonormal with respect to the probability measure
//! `k (1 − α)^{β₁} (1 + α)^{β₂} dα` on `[−1, 1]`, where `k` normalizes the
//! weight to unit mass. They satisfy
//!
//! ```text
//! √b_{n+1} p_{n+1}(α) = (α − a_n) p_n(α) − √b_n p_{n−1}(α),   p_0 ≡ 1,
//! ```
//!
//! with the closed-form monic Jacobi recurrence coefficients `a_n`, `b_n`.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Three-term recurrence data for orthonormal Jacobi polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiBasis {
    beta1: f64,
    beta2: f64,
    /// `a_n`, n = 0..=max_degree.
    diag: Vec<f64>,
    /// `√b_n`, n = 0..=max_degree + 1; `b_0 = 1` by probability normalization.
    offdiag: Vec<f64>,
}

impl JacobiBasis {
    /// Recurrence coefficients up to `max_degree` for exponents `β₁`, `β₂ > −1`.
    pub fn new(beta1: f64, beta2: f64, max_degree: usize) -> Result<Self> {
        if !(beta1 > -1.0 && beta2 > -1.0) || !beta1.is_finite() || !beta2.is_finite() {
            return Err(Error::invalid(format!("Jacobi exponents must exceed -1, got ({beta1}, {beta2})")));
        }
        // Classical notation: weight (1-x)^a (1+x)^b.
        let (a, b) = (beta1, beta2);
        let ab = a + b;
        let mut diag = Vec::with_capacity(max_degree + 1);
        for n in 0..=max_degree {
            let n = n as f64;
            let v = if n == 0.0 {
                (b - a) / (ab + 2.0)
            } else {
                (b * b - a * a) / ((2.0 * n + ab) * (2.0 * n + ab + 2.0))
            };
            diag.push(v);
        }
        let mut offdiag = Vec::with_capacity(max_degree + 2);
        offdiag.push(1.0);
        for n in 1..=max_degree + 1 {
            let n = n as f64;
            let bn = if n == 1.0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * n + ab;
                4.0 * n * (n + a) * (n + b) * (n + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            offdiag.push(bn.sqrt());
        }
        Ok(JacobiBasis { beta1, beta2, diag, offdiag })
    }

    /// Legendre basis (uniform probability measure on `[−1, 1]`).
    pub fn legendre(max_degree: usize) -> Self {
        Self::new(0.0, 0.0, max_degree).expect("valid exponents")
    }

    /// Chebyshev basis of the first kind (arcsine probability measure).
    pub fn chebyshev(max_degree: usize) -> Self {
        Self::new(-0.5, -0.5, max_degree).expect("valid exponents")
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn max_degree(&self) -> usize {
        self.diag.len() - 1
    }

    /// Recurrence pair `(a_n, √b_n)`.
    pub fn recurrence(&self, n: usize) -> (f64, f64) {
        (self.diag[n], self.offdiag[n])
    }

    /// Normalization constant `k` making `k (1−α)^{β₁}(1+α)^{β₂}` a probability density.
    pub fn normalization(&self) -> f64 {
        weight_normalization(self.beta1, self.beta2)
    }

    /// Values `p_0(α), …, p_n(α)`.
    pub fn eval_all(&self, alpha: f64, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let (mut prev, mut cur) = (0.0, 1.0);
        out.push(cur);
        for k in 0..n {
            let next = ((alpha - self.diag[k]) * cur - self.offdiag[k] * prev) / self.offdiag[k + 1];
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    /// Value of `p_n(α)`.
    pub fn eval(&self, n: usize, alpha: f64) -> f64 {
        *self.eval_all(alpha, n).last().unwrap()
    }

    /// `Σ_n c_n p_n(α)` by Clenshaw's recurrence. At most `max_degree + 1`
    /// coefficients are supported.
    pub fn clenshaw(&self, coeffs: &[f64], alpha: f64) -> f64 {
        // p_{k+1} = A_k p_k − B_k p_{k−1} with A_k = (α − a_k)/s_{k+1}, B_k = s_k/s_{k+1}.
        let (mut b1, mut b2) = (0.0, 0.0);
        for k in (0..coeffs.len()).rev() {
            let a_k = (alpha - self.diag[k]) / self.offdiag[k + 1];
            let b_next = if k + 1 < coeffs.len() { self.offdiag[k + 1] / self.offdiag[k + 2] * b2 } else { 0.0 };
            let bk = coeffs[k] + a_k * b1 - b_next;
            b2 = b1;
            b1 = bk;
        }
        b1
    }

    /// Derivative `p_n'(α)` via the differentiated recurrence.
    pub fn eval_derivative(&self, n: usize, alpha: f64) -> f64 {
        let (mut p_prev, mut p) = (0.0, 1.0);
        let (mut d_prev, mut d) = (0.0, 0.0);
        for k in 0..n {
            let s = self.offdiag[k + 1];
            let p_next = ((alpha - self.diag[k]) * p - self.offdiag[k] * p_prev) / s;
            let d_next = (p + (alpha - self.diag[k]) * d - self.offdiag[k] * d_prev) / s;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
        }
        d
    }
}

/// `k(β₁, β₂) = 1 / (2^{β₁+β₂+1} B(β₁+1, β₂+1))`.
pub fn weight_normalization(beta1: f64, beta2: f64) -> f64 {
    let ln_beta = ln_gamma(beta1 + 1.0) + ln_gamma(beta2 + 1.0) - ln_gamma(beta1 + beta2 + 2.0);
    (-(beta1 + beta2 + 1.0) * std::f64::consts::LN_2 - ln_beta).exp()
}

/// A Gauss quadrature rule for the probability measure of a [`JacobiBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// The `N`-point Gauss rule: nodes are the roots of `p_N`, weights sum to one.
///
/// Nodes come from the Jacobi matrix eigenvalues and are then polished by
/// Newton steps on `p_N`; weights use the Christoffel formula
/// `w_j = 1 / Σ_{k<N} p_k(α_j)²`.
pub fn gauss_nodes(basis: &JacobiBasis, n: usize) -> Result<GaussRule> {
    if n == 0 || n > basis.max_degree() {
        return Err(Error::invalid(format!(
            "Gauss rule size must be in 1..={}, got {n}",
            basis.max_degree()
        )));
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            basis.diag[i]
        } else if i + 1 == j {
            basis.offdiag[j]
        } else if j + 1 == i {
            basis.offdiag[i]
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let p = basis.eval(n, *x);
            let dp = basis.eval_derivative(n, *x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            *x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
    }

    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| 1.0 / basis.eval_all(x, n - 1).iter().map(|p| p * p).sum::<f64>())
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(GaussRule { nodes, weights })
}

/// Gauss–Legendre rule on `[−1, 1]` with probability weights.
pub fn gauss_legendre(n: usize) -> GaussRule {
    gauss_nodes(&JacobiBasis::legendre(n), n).expect("n >= 1")
}

use super::pwl::{check_knots, interval_index};
use crate::error::{Error, Result};

/// End conditions closing the cubic spline system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    /// Third derivative continuous at the second and penultimate knots.
    NotAKnot,
    /// Prescribed first derivatives at the two ends.
    Clamped(f64, f64),
    /// Zero second derivative at both ends.
    Natural,
}

/// C² cubic spline stored as knot values plus knot second derivatives `M_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

/// Cubic spline interpolant of `(knots[i], values[i])`.
pub fn fit_spline(knots: &[f64], values: &[f64], boundary: Boundary) -> Result<CubicSpline> {
    let min = if boundary == Boundary::NotAKnot { 4 } else { 2 };
    check_knots(knots, values, min)?;
    let second = second_derivatives(knots, values, boundary)?;
    Ok(CubicSpline { knots: knots.to_vec(), values: values.to_vec(), second })
}

impl CubicSpline {
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Second derivatives at the knots.
    pub fn second_derivatives(&self) -> &[f64] {
        &self.second
    }

    pub fn value(&self, x: f64) -> f64 {
        let i = interval_index(&self.knots, x);
        cubic_piece(&self.knots, &self.values, &self.second, i, x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let i = interval_index(&self.knots, x);
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let (a, b) = (x1 - x, x - x0);
        -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) + (self.values[i + 1] - self.values[i]) / h - (m1 - m0) * h / 6.0
    }
}

/// The cubic on interval `i` with end values `v` and end second derivatives `m`.
pub(crate) fn cubic_piece(knots: &[f64], v: &[f64], m: &[f64], i: usize, x: f64) -> f64 {
    let (x0, x1) = (knots[i], knots[i + 1]);
    let h = x1 - x0;
    let (a, b) = (x1 - x, x - x0);
    // Linear part in lerp form so constant data is reproduced exactly.
    let linear = v[i] + (b / h) * (v[i + 1] - v[i]);
    linear + (m[i] * a * (a * a / h - h) + m[i + 1] * b * (b * b / h - h)) / 6.0
}

/// Knot second derivatives for the chosen end conditions.
///
/// Interior rows read `h_{i−1} M_{i−1} + 2(h_{i−1}+h_i) M_i + h_i M_{i+1} = 6(d_i − d_{i−1})`
/// with `d_i` the divided differences. Not-a-knot eliminates `M_0` and `M_n`
/// so the system stays tridiagonal.
pub(crate) fn second_derivatives(knots: &[f64], values: &[f64], boundary: Boundary) -> Result<Vec<f64>> {
    let n = knots.len() - 1;
    let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n).map(|i| (values[i + 1] - values[i]) / h[i]).collect();

    match boundary {
        Boundary::Clamped(d0, dn) => {
            let mut sub = vec![0.0; n + 1];
            let mut diag = vec![0.0; n + 1];
            let mut sup = vec![0.0; n + 1];
            let mut rhs = vec![0.0; n + 1];
            diag[0] = 2.0 * h[0];
            sup[0] = h[0];
            rhs[0] = 6.0 * (d[0] - d0);
            for i in 1..n {
                sub[i] = h[i - 1];
                diag[i] = 2.0 * (h[i - 1] + h[i]);
                sup[i] = h[i];
                rhs[i] = 6.0 * (d[i] - d[i - 1]);
            }
            sub[n] = h[n - 1];
            diag[n] = 2.0 * h[n - 1];
            rhs[n] = 6.0 * (dn - d[n - 1]);
            thomas(&sub, &diag, &sup, &mut rhs)?;
            Ok(rhs)
        }
        Boundary::Natural => {
            let mut m = vec![0.0; n + 1];
            if n >= 2 {
                let k = n - 1;
                let mut sub = vec![0.0; k];
                let mut diag = vec![0.0; k];
                let mut sup = vec![0.0; k];
                let mut rhs = vec![0.0; k];
                for r in 0..k {
                    let i = r + 1;
                    sub[r] = h[i - 1];
                    diag[r] = 2.0 * (h[i - 1] + h[i]);
                    sup[r] = h[i];
                    rhs[r] = 6.0 * (d[i] - d[i - 1]);
                }
                thomas(&sub, &diag, &sup, &mut rhs)?;
                m[1..n].copy_from_slice(&rhs);
            }
            Ok(m)
        }
        Boundary::NotAKnot => {
            // Unknowns M_1..M_{n−1}; n ≥ 3.
            let k = n - 1;
            let mut sub = vec![0.0; k];
            let mut diag = vec![0.0; k];
            let mut sup = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for r in 0..k {
                let i = r + 1;
                sub[r] = h[i - 1];
                diag[r] = 2.0 * (h[i - 1] + h[i]);
                sup[r] = h[i];
                rhs[r] = 6.0 * (d[i] - d[i - 1]);
            }
            let (h0, h1) = (h[0], h[1]);
            diag[0] = (h0 + h1) * (h0 / h1 + 2.0);
            sup[0] = h1 - h0 * h0 / h1;
            let (ha, hb) = (h[n - 2], h[n - 1]);
            diag[k - 1] = (ha + hb) * (2.0 + hb / ha);
            sub[k - 1] = ha - hb * hb / ha;
            thomas(&sub, &diag, &sup, &mut rhs)?;
            let mut m = vec![0.0; n + 1];
            m[1..n].copy_from_slice(&rhs);
            m[0] = m[1] * (1.0 + h0 / h1) - (h0 / h1) * m[2];
            m[n] = m[n - 1] * (1.0 + hb / ha) - (hb / ha) * m[n - 2];
            Ok(m)
        }
    }
}

/// Solve a tridiagonal system in place. `sub[0]` and `sup[last]` are ignored.
pub(crate) fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::Singular(0));
    }
    rhs[0] /= beta;
    for i in 1..n {
        c[i] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * c[i];
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::Singular(i));
        }
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i + 1] * rhs[i + 1];
    }
    Ok(())
}

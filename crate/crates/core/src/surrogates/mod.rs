//! Approximants `g` of a response `f`: piecewise-linear and cubic spline
//! interpolants, bicubic tensor splines and gPC collocation polynomials.
//!
//! Every model is immutable after fitting and interpolates its construction
//! samples. Evaluation outside the domain box (beyond `1e-12`) is rejected.

pub mod gpc;
pub mod jacobi;
pub mod pwl;
pub mod spline;
pub mod tensor;

pub use gpc::{fit_gpc_collocation, GpcModel};
pub use jacobi::{gauss_legendre, gauss_nodes, GaussRule, JacobiBasis};
pub use pwl::{fit_pwl, PiecewiseLinear};
pub use spline::{fit_spline, Boundary, CubicSpline};
pub use tensor::{fit_tensor_spline, TensorSpline};

use crate::error::{Error, Result};
use crate::pushforward::{Evaluable, ParameterBox};

/// Tolerance for points outside the domain box; closer points are clamped.
pub const DOMAIN_TOLERANCE: f64 = 1e-12;

/// A fitted surrogate together with its domain.
#[derive(Clone, Debug, PartialEq)]
pub enum SurrogateModel {
    Pwl(PiecewiseLinear),
    Spline(CubicSpline),
    TensorSpline(TensorSpline),
    Gpc(GpcModel),
}

impl SurrogateModel {
    /// Piecewise-linear interpolant of `f` at `n` equispaced nodes of `[lo, hi]`.
    pub fn pwl<F: Evaluable + ?Sized>(f: &F, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let xs = equispaced(lo, hi, n)?;
        let ys = sample_1d(f, &xs)?;
        Ok(SurrogateModel::Pwl(fit_pwl(&xs, &ys)?))
    }

    /// Cubic spline of `f` at `n` equispaced nodes of `[lo, hi]`.
    pub fn spline<F: Evaluable + ?Sized>(f: &F, lo: f64, hi: f64, n: usize, boundary: Boundary) -> Result<Self> {
        let xs = equispaced(lo, hi, n)?;
        let ys = sample_1d(f, &xs)?;
        Ok(SurrogateModel::Spline(fit_spline(&xs, &ys, boundary)?))
    }

    /// Bicubic spline of `f` on an `nx × ny` equispaced grid of a 2D box.
    pub fn tensor_spline<F: Evaluable + ?Sized>(f: &F, bbox: &ParameterBox, nx: usize, ny: usize) -> Result<Self> {
        if bbox.dim() != 2 {
            return Err(Error::Unsupported(format!("tensor splines need a 2D box, got dimension {}", bbox.dim())));
        }
        let xs = equispaced(bbox.lower()[0], bbox.upper()[0], nx)?;
        let ys = equispaced(bbox.lower()[1], bbox.upper()[1], ny)?;
        let mut values = Vec::with_capacity(nx * ny);
        for &x in &xs {
            for &y in &ys {
                let v = f.eval(&[x, y]);
                if !v.is_finite() {
                    return Err(Error::NonFiniteAtNode { node: vec![x, y], value: v });
                }
                values.push(v);
            }
        }
        Ok(SurrogateModel::TensorSpline(fit_tensor_spline(&xs, &ys, &values)?))
    }

    /// gPC collocation of `f` with `n` Gauss nodes of `basis` on `[lo, hi]`.
    pub fn gpc<F: Evaluable + ?Sized>(f: &F, basis: &JacobiBasis, n: usize, lo: f64, hi: f64) -> Result<Self> {
        Ok(SurrogateModel::Gpc(fit_gpc_collocation(f, basis, n, lo, hi)?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SurrogateModel::Pwl(_) => "pwl",
            SurrogateModel::Spline(_) => "spline",
            SurrogateModel::TensorSpline(_) => "tensor-spline",
            SurrogateModel::Gpc(_) => "gpc",
        }
    }

    pub fn domain(&self) -> ParameterBox {
        let (lo, hi) = match self {
            SurrogateModel::Pwl(m) => (vec![m.knots()[0]], vec![*m.knots().last().unwrap()]),
            SurrogateModel::Spline(m) => (vec![m.knots()[0]], vec![*m.knots().last().unwrap()]),
            SurrogateModel::TensorSpline(m) => (
                vec![m.xs()[0], m.ys()[0]],
                vec![*m.xs().last().unwrap(), *m.ys().last().unwrap()],
            ),
            SurrogateModel::Gpc(m) => {
                let (lo, hi) = m.interval();
                (vec![lo], vec![hi])
            }
        };
        ParameterBox::new(lo, hi).expect("fitted models have valid domains")
    }

    /// Value at `x`. Points within [`DOMAIN_TOLERANCE`] of the box are clamped.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let domain = self.domain();
        if !domain.contains(x, DOMAIN_TOLERANCE) {
            return Err(Error::OutOfDomain { point: x.to_vec() });
        }
        let clamp = |i: usize| x[i].clamp(domain.lower()[i], domain.upper()[i]);
        Ok(match self {
            SurrogateModel::Pwl(m) => m.value(clamp(0)),
            SurrogateModel::Spline(m) => m.value(clamp(0)),
            SurrogateModel::TensorSpline(m) => m.value(clamp(0), clamp(1)),
            SurrogateModel::Gpc(m) => m.value(clamp(0)),
        })
    }

    /// `dg/dα` for one-dimensional smooth models.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        match self {
            SurrogateModel::Spline(m) => Ok(m.derivative(x)),
            SurrogateModel::Gpc(m) => Ok(m.derivative(x)),
            other => Err(Error::Unsupported(format!("derivative of a {} surrogate", other.kind()))),
        }
    }
}

/// Out-of-domain points evaluate to NaN, which pushforwards report as errors.
impl Evaluable for SurrogateModel {
    fn eval(&self, x: &[f64]) -> f64 {
        self.evaluate(x).unwrap_or(f64::NAN)
    }
}

/// `n ≥ 2` equispaced points from `lo` to `hi` inclusive.
pub fn equispaced(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 points, got {n}")));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect())
}

fn sample_1d<F: Evaluable + ?Sized>(f: &F, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let v = f.eval(&[x]);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteAtNode { node: vec![x], value: v })
            }
        })
        .collect()
}

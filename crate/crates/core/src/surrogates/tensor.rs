use super::pwl::{check_knots, interval_index};
use super::spline::{cubic_piece, second_derivatives, Boundary};
use crate::error::{Error, Result};

/// Bicubic not-a-knot tensor-product spline on a rectangular grid.
///
/// Stored in second-derivative form: `f`, `∂²f/∂x²`, `∂²f/∂y²` and
/// `∂⁴f/∂x²∂y²` at every grid point, row-major with `y` fastest. Evaluation
/// runs the 1D cubic formula along `x` on `(f, f_xx)` and on `(f_yy, f_xxyy)`,
/// then once along `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    f: Vec<f64>,
    fxx: Vec<f64>,
    fyy: Vec<f64>,
    fxxyy: Vec<f64>,
}

/// Fit from `values[i * ys.len() + j] = f(xs[i], ys[j])`, at least 4 knots per axis.
pub fn fit_tensor_spline(xs: &[f64], ys: &[f64], values: &[f64]) -> Result<TensorSpline> {
    let (nx, ny) = (xs.len(), ys.len());
    if values.len() != nx * ny {
        return Err(Error::invalid(format!("ragged grid: {} values for a {nx}x{ny} grid", values.len())));
    }
    check_knots(xs, xs, 4)?;
    check_knots(ys, ys, 4)?;
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index, value: values[index] });
    }

    let column = |data: &[f64], j: usize| -> Vec<f64> { (0..nx).map(|i| data[i * ny + j]).collect() };
    let along_y = |data: &[f64]| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(nx * ny);
        for row in data.chunks(ny) {
            out.extend(second_derivatives(ys, row, Boundary::NotAKnot)?);
        }
        Ok(out)
    };

    let mut fxx = vec![0.0; nx * ny];
    for j in 0..ny {
        let m = second_derivatives(xs, &column(values, j), Boundary::NotAKnot)?;
        for (i, v) in m.into_iter().enumerate() {
            fxx[i * ny + j] = v;
        }
    }
    let fyy = along_y(values)?;
    let fxxyy = along_y(&fxx)?;
    Ok(TensorSpline { xs: xs.to_vec(), ys: ys.to_vec(), f: values.to_vec(), fxx, fyy, fxxyy })
}

impl TensorSpline {
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        let ny = self.ys.len();
        let i = interval_index(&self.xs, x);
        let j = interval_index(&self.ys, y);
        let along_x = |data: &[f64], sec: &[f64], jj: usize| {
            let v = [data[i * ny + jj], data[(i + 1) * ny + jj]];
            let m = [sec[i * ny + jj], sec[(i + 1) * ny + jj]];
            cubic_piece(&self.xs[i..i + 2], &v, &m, 0, x)
        };
        let v = [along_x(&self.f, &self.fxx, j), along_x(&self.f, &self.fxx, j + 1)];
        let m = [along_x(&self.fyy, &self.fxxyy, j), along_x(&self.fyy, &self.fxxyy, j + 1)];
        cubic_piece(&self.ys[j..j + 2], &v, &m, 0, y)
    }
}

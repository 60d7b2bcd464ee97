//! Least-squares convergence-rate fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Errors at or below this value are treated as round-off and excluded from fits.
pub const ERROR_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateModel {
    /// `error = C · N^s`, fitted on `(ln N, ln error)`.
    Power,
    /// `error = C · 10^{sN}`, fitted on `(N, log10 error)`.
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub model: RateModel,
    pub slope: f64,
    pub coefficient: f64,
    pub r_squared: f64,
    pub n_min: f64,
    pub n_max: f64,
    pub points: usize,
}

impl RateFit {
    pub fn predict(&self, n: f64) -> f64 {
        match self.model {
            RateModel::Power => self.coefficient * n.powf(self.slope),
            RateModel::Exponential => self.coefficient * 10f64.powf(self.slope * n),
        }
    }
}

/// Fit `model` to the pairs with finite error above [`ERROR_FLOOR`].
///
/// For the exponential model only the points before the first sub-floor
/// error are used, since the decay stops there.
pub fn fit_rate(ns: &[f64], errors: &[f64], model: RateModel) -> Result<RateFit> {
    if ns.len() != errors.len() {
        return Err(Error::LengthMismatch(ns.len(), errors.len()));
    }
    let usable: Vec<(f64, f64)> = match model {
        RateModel::Power => ns.iter().zip(errors).filter(|(_, &e)| e.is_finite() && e > ERROR_FLOOR).map(|(&n, &e)| (n, e)).collect(),
        RateModel::Exponential => ns
            .iter()
            .zip(errors)
            .take_while(|(_, &e)| !(e <= ERROR_FLOOR))
            .filter(|(_, &e)| e.is_finite())
            .map(|(&n, &e)| (n, e))
            .collect(),
    };
    if usable.len() < 3 {
        return Err(Error::TooFewPoints(usable.len()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = usable
        .iter()
        .map(|&(n, e)| match model {
            RateModel::Power => (n.ln(), e.ln()),
            RateModel::Exponential => (n, e.log10()),
        })
        .unzip();
    let (slope, intercept, r_squared) = least_squares(&xs, &ys);
    let coefficient = match model {
        RateModel::Power => intercept.exp(),
        RateModel::Exponential => 10f64.powf(intercept),
    };
    let n_min = usable.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let n_max = usable.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(RateFit { model, slope, coefficient, r_squared, n_min, n_max, points: usable.len() })
}

/// Ordinary least squares `y ≈ a x + b`; returns `(a, b, R²)`.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    (slope, intercept, r2)
}

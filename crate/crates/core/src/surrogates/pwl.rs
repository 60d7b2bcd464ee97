use crate::error::{Error, Result};

/// Continuous piecewise-linear interpolant through `(knots[i], values[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

/// Interpolate linearly between adjacent samples. Knots must be strictly
/// increasing; their extremes define the domain.
pub fn fit_pwl(knots: &[f64], values: &[f64]) -> Result<PiecewiseLinear> {
    check_knots(knots, values, 2)?;
    Ok(PiecewiseLinear { knots: knots.to_vec(), values: values.to_vec() })
}

impl PiecewiseLinear {
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `x`, which must lie within the knot span.
    pub fn value(&self, x: f64) -> f64 {
        let i = interval_index(&self.knots, x);
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let t = (x - x0) / (x1 - x0);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }
}

/// Index `i` with `knots[i] ≤ x ≤ knots[i+1]`, clamped to the end intervals.
pub(crate) fn interval_index(knots: &[f64], x: f64) -> usize {
    let n = knots.len();
    knots.partition_point(|&k| k <= x).saturating_sub(1).min(n - 2)
}

pub(crate) fn check_knots(knots: &[f64], values: &[f64], min: usize) -> Result<()> {
    if knots.len() != values.len() {
        return Err(Error::LengthMismatch(knots.len(), values.len()));
    }
    if knots.len() < min {
        return Err(Error::invalid(format!("need at least {min} knots, got {}", knots.len())));
    }
    for (index, &value) in knots.iter().chain(values).enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index: index % knots.len(), value });
        }
    }
    if let Some(i) = knots.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(Error::invalid(format!(
            "knots must be strictly increasing: knots[{i}] = {}, knots[{}] = {}",
            knots[i],
            i + 1,
            knots[i + 1]
        )));
    }
    Ok(())
}

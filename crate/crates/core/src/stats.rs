//! Small statistics helpers shared by the fits and the Monte-Carlo reports.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub points: usize,
}

/// Weighted least-squares line `y = intercept + slope·x`.
///
/// The slope standard error is `sqrt(s² / Σw(x - x̄)²)` with the residual
/// variance `s² = Σw r² / (k - 2)`; it is zero for an exact two-point fit.
pub fn least_squares(xs: &[f64], ys: &[f64], weights: Option<&[f64]>) -> Result<LinearFit> {
    let k = xs.len();
    if ys.len() != k || weights.is_some_and(|w| w.len() != k) {
        return Err(Error::Fit("mismatched input lengths".into()));
    }
    if k < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {k}")));
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    if (0..k).any(|i| !(w(i) > 0.0 && xs[i].is_finite() && ys[i].is_finite())) {
        return Err(Error::Fit("non-finite value or non-positive weight".into()));
    }
    let sw: f64 = (0..k).map(w).sum();
    let xbar = (0..k).map(|i| w(i) * xs[i]).sum::<f64>() / sw;
    let ybar = (0..k).map(|i| w(i) * ys[i]).sum::<f64>() / sw;
    let sxx: f64 = (0..k).map(|i| w(i) * (xs[i] - xbar).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("all x values coincide".into()));
    }
    let sxy: f64 = (0..k).map(|i| w(i) * (xs[i] - xbar) * (ys[i] - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let slope_se = if k > 2 {
        let rss: f64 = (0..k)
            .map(|i| w(i) * (ys[i] - intercept - slope * xs[i]).powi(2))
            .sum();
        (rss / (k - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_se,
        points: k,
    })
}

/// Sample mean and standard error of the mean.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

/// Frequency `p̂ = hits/total` and its binomial standard error.
pub fn proportion(hits: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = hits as f64 / total as f64;
    (p, (p * (1.0 - p) / total as f64).sqrt())
}

//! Least-squares fits of detected lifespans.

use super::sweep::{RunStatus, SweepRecord};
use super::{LifespanError, Result};
use serde::{Deserialize, Serialize};

pub const MIN_FIT_POINTS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl Fit {
    /// Two-sided 95% interval for the slope.
    pub fn slope_interval(&self) -> (f64, f64) {
        let half = student_t_975(self.points.saturating_sub(2)) * self.stderr;
        (self.slope - half, self.slope + half)
    }
}

/// 97.5% quantile of Student's t with `dof` degrees of freedom.
pub fn student_t_975(dof: usize) -> f64 {
    const TABLE: [f64; 30] = [
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
        2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
    ];
    match dof {
        0 => f64::INFINITY,
        d if d <= 30 => TABLE[d - 1],
        _ => 1.960,
    }
}

/// Ordinary least squares of `y` on `x`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<Fit> {
    let n = x.len();
    if n != y.len() {
        return Err(LifespanError::Degenerate(format!("{n} abscissae but {} ordinates", y.len())));
    }
    if n < MIN_FIT_POINTS {
        return Err(LifespanError::InsufficientPoints { need: MIN_FIT_POINTS, got: n });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(LifespanError::Degenerate("non-finite value in fit data".into()));
    }
    let nf = n as f64;
    let (mx, my) = (x.iter().sum::<f64>() / nf, y.iter().sum::<f64>() / nf);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx <= 0.0 {
        return Err(LifespanError::Degenerate("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    Ok(Fit { slope, intercept, stderr: (ssr / (nf - 2.0) / sxx).sqrt(), r_squared, points: n })
}

/// `(eps, T)` of the blown-up records, with `T` the crossing time of
/// `threshold` or the main detection time when `None`.
fn points(records: &[SweepRecord], threshold: Option<f64>) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter(|r| r.status == RunStatus::BlownUp)
        .filter_map(|r| {
            let t = match threshold {
                None => r.t_eps,
                Some(level) => r.crossing(level),
            };
            t.filter(|t| *t > 0.0).map(|t| (r.epsilon, t))
        })
        .collect()
}

/// Power law: `ln T` against `ln eps`.
pub fn fit_slope(records: &[SweepRecord]) -> Result<Fit> {
    fit_slope_at(records, None)
}

/// Power law using the crossing times of another threshold.
pub fn fit_slope_at(records: &[SweepRecord], threshold: Option<f64>) -> Result<Fit> {
    let (x, y): (Vec<f64>, Vec<f64>) = points(records, threshold).into_iter().map(|(e, t)| (e.ln(), t.ln())).unzip();
    ols(&x, &y)
}

/// Exponential law: `ln T` against `eps^(-(p-1))`.
pub fn fit_exponential(records: &[SweepRecord], p: f64) -> Result<Fit> {
    let (x, y): (Vec<f64>, Vec<f64>) =
        points(records, None).into_iter().map(|(e, t)| (e.powf(1.0 - p), t.ln())).unzip();
    ols(&x, &y)
}

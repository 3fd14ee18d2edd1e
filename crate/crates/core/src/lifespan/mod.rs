//! Lifespan exponents, amplitude sweeps and log-log fits of the detected
//! blow-up times.

mod fit;
mod report;
mod sweep;

pub use fit::{fit_exponential, fit_slope, fit_slope_at, ols, student_t_975, Fit};
pub use report::{
    analyze, read_records_csv, summarize, write_records_csv, write_report, Analysis, ReportPaths, SensitivityRow,
    Summary, UpperBoundCheck, SUMMARY_SCHEMA_VERSION,
};
pub use sweep::{geometric_epsilons, monotone_in_epsilon, sweep, RunStatus, SweepConfig, SweepRecord};

use crate::aux_ode::{data_weight, mu_of, AuxError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative distance to the critical power inside which a run counts as critical.
pub const CRITICAL_BAND: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LifespanError {
    #[error("lifespan: invalid parameters: {0}")]
    BadParams(String),
    #[error("lifespan: invalid sweep configuration: {0}")]
    BadConfig(String),
    #[error("lifespan: a fit needs at least {need} blown-up records, got {got}")]
    InsufficientPoints { need: usize, got: usize },
    #[error("lifespan: degenerate fit data: {0}")]
    Degenerate(String),
    #[error("lifespan: malformed records file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Aux(#[from] AuxError),
}

pub type Result<T> = std::result::Result<T, LifespanError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Power-law lifespan `T ~ eps^(-2(p-1)/gamma)`.
    Subcritical,
    /// Exponential lifespan `ln T ~ eps^(-(p-1))`.
    Critical,
    /// Above the critical power; no blow-up prediction.
    Supercritical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentParams {
    pub n: usize,
    pub m: f64,
    pub p: f64,
    pub mu: f64,
    /// Critical power; infinite in one dimension (`null` in JSON).
    #[serde(with = "infinite_as_null")]
    pub p_t: f64,
    pub gamma_t: f64,
    /// Critical power of the `m = 0` wave equation; infinite in one dimension.
    #[serde(with = "infinite_as_null")]
    pub p_g: f64,
    pub a_m: f64,
    pub regime: Regime,
    /// `2(p-1)/gamma_T` in the subcritical regime.
    pub upper_exponent: Option<f64>,
    /// `(1/(p-1) + m/2)^(-1)`, one dimension only.
    pub lower_exponent_1d: Option<f64>,
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl ExponentParams {
    /// Slope of `ln T` against `ln eps` implied by the upper bound.
    pub fn predicted_slope(&self) -> Option<f64> {
        self.upper_exponent.map(|e| -e)
    }
}

/// `(m+1)(n-1) - m`, the bracket in `gamma_T`.
fn bracket(n: usize, m: f64) -> f64 {
    (m + 1.0) * (n as f64 - 1.0) - m
}

pub fn critical_power(n: usize, m: f64) -> f64 {
    if n == 1 {
        f64::INFINITY
    } else {
        1.0 + 2.0 / bracket(n, m)
    }
}

pub fn glassey_power(n: usize) -> f64 {
    critical_power(n, 0.0)
}

pub fn gamma_t(n: usize, m: f64, p: f64) -> f64 {
    2.0 - bracket(n, m) * (p - 1.0)
}

pub fn exponents(n: usize, m: f64, p: f64) -> Result<ExponentParams> {
    if n == 0 {
        return Err(LifespanError::BadParams("dimension must be >= 1".into()));
    }
    if !(m.is_finite() && m >= 0.0) {
        return Err(LifespanError::BadParams(format!("m = {m} must be finite and >= 0")));
    }
    if !(p.is_finite() && p > 1.0) {
        return Err(LifespanError::BadParams(format!("p = {p} must be finite and > 1")));
    }
    let p_t = critical_power(n, m);
    let gamma = gamma_t(n, m, p);
    let regime = if p_t.is_finite() && ((p - p_t) / p_t).abs() <= CRITICAL_BAND {
        Regime::Critical
    } else if p < p_t {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    };
    Ok(ExponentParams {
        n,
        m,
        p,
        mu: mu_of(m),
        p_t,
        gamma_t: gamma,
        p_g: glassey_power(n),
        a_m: data_weight(m)?,
        regime,
        upper_exponent: (regime == Regime::Subcritical).then(|| 2.0 * (p - 1.0) / gamma),
        lower_exponent_1d: (n == 1).then(|| 1.0 / (1.0 / (p - 1.0) + m / 2.0)),
    })
}

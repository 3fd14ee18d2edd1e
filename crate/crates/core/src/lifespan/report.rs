//! CSV records and JSON summaries of a sweep.

use super::fit::{fit_exponential, fit_slope, fit_slope_at, Fit};
use super::sweep::{monotone_in_epsilon, RunStatus, SweepConfig, SweepRecord};
use super::{ExponentParams, LifespanError, Regime, Result};
use crate::manifest::config_hash;
use crate::solver::stepper::Crossing;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

const FIXED_COLUMNS: [&str; 6] = ["epsilon", "status", "t_eps", "max_ut", "final_t", "refined_t_eps"];
const TAIL_COLUMNS: [&str; 4] = ["fingerprint", "wall_seconds", "error", "config_hash"];
const CROSSING_PREFIX: &str = "t_at_";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub threshold: f64,
    pub slope: Option<f64>,
    /// `|slope - main slope| / |main slope|`.
    pub relative_shift: Option<f64>,
}

/// Dimensions above one only have an upper bound on the lifespan, so the
/// measured exponent is compared against it rather than asserted equal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundCheck {
    pub predicted_exponent: f64,
    pub measured_exponent: f64,
    pub ratio: f64,
}

/// Fit of a set of records against the predicted law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub params: ExponentParams,
    /// `"power"` (ln T on ln eps) or `"exponential"` (ln T on eps^(1-p)).
    pub law: String,
    pub fit: Option<Fit>,
    /// Why `fit` is missing.
    pub fit_reason: Option<String>,
    pub predicted_slope: Option<f64>,
    /// Fitted over predicted slope.
    pub slope_ratio: Option<f64>,
    pub slope_ci95: Option<(f64, f64)>,
    pub sensitivity: Vec<SensitivityRow>,
    /// Largest pairwise slope difference across thresholds, relative to the main slope.
    pub sensitivity_spread: Option<f64>,
    pub monotone: bool,
    pub blown_up: usize,
    /// Records left out of the fit, as (eps, status).
    pub excluded: Vec<(f64, RunStatus)>,
    pub upper_bound_check: Option<UpperBoundCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub config_hash: String,
    pub config: SweepConfig,
    #[serde(flatten)]
    pub analysis: Analysis,
}

/// Fits `records` and compares with `params`; `thresholds` are the extra
/// detection levels to refit for the sensitivity column.
pub fn analyze(records: &[SweepRecord], params: &ExponentParams, thresholds: &[f64]) -> Analysis {
    let critical = params.regime == Regime::Critical;
    let fitted = if critical { fit_exponential(records, params.p) } else { fit_slope(records) };
    let (fit, fit_reason) = match fitted {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let predicted_slope = if critical { None } else { params.predicted_slope() };
    let main_slope = fit.filter(|_| !critical).map(|f| f.slope);
    let sensitivity: Vec<SensitivityRow> = thresholds
        .iter()
        .map(|&threshold| {
            let slope = fit_slope_at(records, Some(threshold)).ok().map(|f| f.slope);
            let relative_shift = slope.zip(main_slope).map(|(s, m)| (s - m).abs() / m.abs());
            SensitivityRow { threshold, slope, relative_shift }
        })
        .collect();
    let sensitivity_spread = main_slope.and_then(|m| {
        let slopes: Option<Vec<f64>> = sensitivity.iter().map(|r| r.slope).collect();
        let slopes = slopes?;
        let hi = slopes.iter().copied().fold(m, f64::max);
        let lo = slopes.iter().copied().fold(m, f64::min);
        Some((hi - lo) / m.abs())
    });
    let upper_bound_check =
        (params.n >= 2).then_some(()).and(params.upper_exponent.zip(main_slope)).map(|(predicted, slope)| {
            UpperBoundCheck { predicted_exponent: predicted, measured_exponent: -slope, ratio: -slope / predicted }
        });
    Analysis {
        params: *params,
        law: if critical { "exponential" } else { "power" }.into(),
        fit,
        fit_reason,
        predicted_slope,
        slope_ratio: main_slope.zip(predicted_slope).map(|(s, p)| s / p),
        slope_ci95: fit.filter(|_| !critical).map(|f| f.slope_interval()),
        sensitivity,
        sensitivity_spread,
        monotone: monotone_in_epsilon(records),
        blown_up: records.iter().filter(|r| r.status == RunStatus::BlownUp && r.t_eps.is_some()).count(),
        excluded: records
            .iter()
            .filter(|r| r.status != RunStatus::BlownUp || r.t_eps.is_none())
            .map(|r| (r.epsilon, r.status))
            .collect(),
        upper_bound_check,
    }
}

pub fn summarize(records: &[SweepRecord], params: &ExponentParams, config: &SweepConfig) -> Summary {
    Summary {
        schema_version: SUMMARY_SCHEMA_VERSION,
        config_hash: config_hash(config),
        config: config.clone(),
        analysis: analyze(records, params, &config.sensitivity_thresholds),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per record, with a `t_at_<level>` column per detection level.
pub fn write_records_csv(path: &Path, records: &[SweepRecord], hash: &str) -> Result<()> {
    let levels: Vec<f64> =
        records.first().map(|r| r.crossings.iter().map(|c| c.threshold).collect()).unwrap_or_default();
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(levels.iter().map(|l| format!("{CROSSING_PREFIX}{l:e}")));
    header.extend(TAIL_COLUMNS.iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for r in records {
        if r.crossings.iter().map(|c| c.threshold).ne(levels.iter().copied()) {
            return Err(LifespanError::Parse(format!("record at eps = {} has different detection levels", r.epsilon)));
        }
        let mut row = vec![
            r.epsilon.to_string(),
            r.status.as_str().to_string(),
            opt(r.t_eps),
            r.max_ut.to_string(),
            r.final_t.to_string(),
            opt(r.refined_t_eps),
        ];
        row.extend(r.crossings.iter().map(|c| opt(c.t)));
        row.extend([
            r.fingerprint.clone(),
            r.wall_seconds.to_string(),
            r.error.clone().unwrap_or_default(),
            hash.into(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header = rdr.headers()?.clone();
    let col = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| LifespanError::Parse(format!("missing column {name}")))
    };
    let idx: Vec<usize> = FIXED_COLUMNS.iter().chain(&TAIL_COLUMNS[..3]).map(|c| col(c)).collect::<Result<_>>()?;
    let levels: Vec<(usize, f64)> = header
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.strip_prefix(CROSSING_PREFIX).map(|l| (i, l)))
        .map(|(i, l)| l.parse().map(|v| (i, v)).map_err(|_| LifespanError::Parse(format!("bad level column {l}"))))
        .collect::<Result<_>>()?;
    let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| LifespanError::Parse(format!("bad {what}: {s:?}")));
    let maybe = |s: &str, what: &str| {
        if s.is_empty() {
            Ok(None)
        } else {
            num(s, what).map(Some)
        }
    };
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let f = |k: usize| row.get(idx[k]).unwrap_or("");
        out.push(SweepRecord {
            epsilon: num(f(0), "epsilon")?,
            status: RunStatus::parse(f(1)).ok_or_else(|| LifespanError::Parse(format!("bad status {:?}", f(1))))?,
            t_eps: maybe(f(2), "t_eps")?,
            max_ut: num(f(3), "max_ut")?,
            final_t: num(f(4), "final_t")?,
            refined_t_eps: maybe(f(5), "refined_t_eps")?,
            crossings: levels
                .iter()
                .map(|&(i, threshold)| Ok(Crossing { threshold, t: maybe(row.get(i).unwrap_or(""), "crossing")? }))
                .collect::<Result<_>>()?,
            fingerprint: f(6).to_string(),
            wall_seconds: num(f(7), "wall_seconds")?,
            error: Some(f(8).to_string()).filter(|s| !s.is_empty()),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
}

/// Writes `records.csv` and `summary.json` into `dir`.
pub fn write_report(
    dir: &Path,
    records: &[SweepRecord],
    params: &ExponentParams,
    config: &SweepConfig,
) -> Result<(Summary, ReportPaths)> {
    std::fs::create_dir_all(dir)?;
    let summary = summarize(records, params, config);
    let paths = ReportPaths { csv: dir.join("records.csv"), json: dir.join("summary.json") };
    write_records_csv(&paths.csv, records, &summary.config_hash)?;
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    std::fs::write(&paths.json, json)?;
    Ok((summary, paths))
}

//! Independent blow-up runs over a list of amplitudes.

use super::{LifespanError, Result};
use crate::solver::stepper::{Crossing, Status};
use crate::solver::{run_until_blowup, sample_data, GridSpec, Profile, SimConfig, SpectralGrid};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub grid: GridSpec,
    pub sim: SimConfig,
    pub profile: Profile,
    /// Strictly decreasing amplitudes.
    pub epsilons: Vec<f64>,
    /// Extra detection levels whose crossing times are recorded for the
    /// threshold-sensitivity fits.
    pub sensitivity_thresholds: Vec<f64>,
    /// Repeat every run with twice the points per axis and record its lifespan.
    pub refine: bool,
    /// Concurrent runs; 0 uses every available core.
    pub parallelism: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            grid: GridSpec { dim: 1, n: 4096, half_width: 200.0 },
            sim: SimConfig { m: 1.0, p: 2.0, t_max: 18.0, ..SimConfig::default() },
            profile: Profile::default(),
            epsilons: geometric_epsilons(0.8, std::f64::consts::SQRT_2, 5),
            sensitivity_thresholds: vec![1e5, 1e7],
            refine: false,
            parallelism: 0,
        }
    }
}

/// `count` amplitudes starting at `start`, each `ratio` times smaller.
pub fn geometric_epsilons(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start / ratio.powi(k as i32)).collect()
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LifespanError::BadConfig(msg));
        if self.epsilons.len() < 3 {
            return bad(format!("need at least 3 amplitudes for a slope fit, got {}", self.epsilons.len()));
        }
        if self.epsilons.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return bad("amplitudes must be finite and >= 0".into());
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return bad("amplitudes must be strictly decreasing".into());
        }
        if self.sensitivity_thresholds.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return bad("sensitivity thresholds must be positive".into());
        }
        let grid = SpectralGrid::new(self.grid).map_err(|e| LifespanError::BadConfig(e.to_string()))?;
        self.run_config().validate(&grid).map_err(|e| LifespanError::BadConfig(e.to_string()))?;
        if self.refine {
            SpectralGrid::new(self.refined_grid())
                .map_err(|e| LifespanError::BadConfig(format!("refined grid: {e}")))?;
        }
        Ok(())
    }

    fn run_config(&self) -> SimConfig {
        let mut cfg = self.sim.clone();
        for &x in &self.sensitivity_thresholds {
            if !cfg.extra_thresholds.contains(&x) {
                cfg.extra_thresholds.push(x);
            }
        }
        cfg
    }

    fn refined_grid(&self) -> GridSpec {
        GridSpec { n: 2 * self.grid.n, ..self.grid }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    BlownUp,
    HorizonReached,
    StepUnderflow,
    /// The run returned an error; see `SweepRecord::error`.
    Failed,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::BlownUp => "blown_up",
            RunStatus::HorizonReached => "horizon_reached",
            RunStatus::StepUnderflow => "step_underflow",
            RunStatus::Failed => "failed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [RunStatus::BlownUp, RunStatus::HorizonReached, RunStatus::StepUnderflow, RunStatus::Failed]
            .into_iter()
            .find(|r| r.as_str() == s)
    }
}

impl From<Status> for RunStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::BlownUp => RunStatus::BlownUp,
            Status::HorizonReached => RunStatus::HorizonReached,
            Status::StepUnderflow => RunStatus::StepUnderflow,
            // a finished run is never still running
            Status::Running => RunStatus::Failed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub epsilon: f64,
    pub status: RunStatus,
    pub t_eps: Option<f64>,
    pub final_t: f64,
    pub max_ut: f64,
    /// Crossing times of the main and sensitivity thresholds.
    pub crossings: Vec<Crossing>,
    pub refined_t_eps: Option<f64>,
    pub fingerprint: String,
    pub wall_seconds: f64,
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn crossing(&self, threshold: f64) -> Option<f64> {
        self.crossings.iter().find(|c| c.threshold == threshold).and_then(|c| c.t)
    }

    fn failed(epsilon: f64, error: String, cfg: &SimConfig) -> Self {
        SweepRecord {
            epsilon,
            status: RunStatus::Failed,
            t_eps: None,
            final_t: 0.0,
            max_ut: f64::NAN,
            crossings: levels(cfg).into_iter().map(|threshold| Crossing { threshold, t: None }).collect(),
            refined_t_eps: None,
            fingerprint: String::new(),
            wall_seconds: 0.0,
            error: Some(error),
        }
    }
}

/// Detection levels in the order the solver reports their crossings.
fn levels(cfg: &SimConfig) -> Vec<f64> {
    let mut levels: Vec<f64> = std::iter::once(cfg.v_threshold).chain(cfg.extra_thresholds.iter().copied()).collect();
    levels.dedup();
    levels
}

fn run_one(grid: &SpectralGrid, cfg: &SimConfig, profile: Profile, epsilon: f64) -> SweepRecord {
    let outcome = sample_data(grid, profile, epsilon, cfg.m).and_then(|data| run_until_blowup(grid, &data, cfg));
    match outcome {
        Ok((rec, _)) => SweepRecord {
            epsilon,
            status: rec.status.into(),
            t_eps: rec.t_eps,
            final_t: rec.final_t,
            max_ut: rec.max_ut,
            crossings: rec.crossings,
            refined_t_eps: None,
            fingerprint: rec.fingerprint,
            wall_seconds: rec.wall_seconds,
            error: None,
        },
        Err(e) => SweepRecord::failed(epsilon, e.to_string(), cfg),
    }
}

/// Runs every amplitude on a pool of `parallelism` workers. Failed runs are
/// recorded, not propagated. Records come back ordered by decreasing amplitude.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let grid = SpectralGrid::new(cfg.grid).map_err(|e| LifespanError::BadConfig(e.to_string()))?;
    let refined = if cfg.refine {
        Some(SpectralGrid::new(cfg.refined_grid()).map_err(|e| LifespanError::BadConfig(e.to_string()))?)
    } else {
        None
    };
    let sim = cfg.run_config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| LifespanError::BadConfig(format!("worker pool: {e}")))?;
    let mut records: Vec<SweepRecord> = pool.install(|| {
        cfg.epsilons
            .par_iter()
            .map(|&eps| {
                let mut rec = run_one(&grid, &sim, cfg.profile, eps);
                if let Some(fine) = &refined {
                    rec.refined_t_eps = run_one(fine, &sim, cfg.profile, eps).t_eps;
                }
                rec
            })
            .collect()
    });
    records.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    Ok(records)
}

/// Whether the blown-up lifespans do not increase with the amplitude.
pub fn monotone_in_epsilon(records: &[SweepRecord]) -> bool {
    let mut pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.status == RunStatus::BlownUp)
        .filter_map(|r| r.t_eps.map(|t| (r.epsilon, t)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).all(|w| w[1].1 <= w[0].1)
}

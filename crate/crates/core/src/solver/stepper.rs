//! RK4 time stepping of the first-order system `u' = v`, `v' = t^(2m) Δu + |v|^p`.

use super::data::{CauchyData, Profile};
use super::grid::{GridSpec, SpectralGrid};
use super::linear::linear_evolve_spectral;
use super::{abs_pow, Result, SolverError};
use crate::aux_ode::phase;
use crate::manifest::config_hash;
use crate::propagator::Propagator;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const TRACE_SCHEMA_VERSION: u32 = 1;

/// Smallest step before a run is declared stalled.
const MIN_DT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub m: f64,
    pub p: f64,
    pub cfl: f64,
    /// Blow-up is declared once `max |u_t|` reaches this level.
    pub v_threshold: f64,
    /// Further levels whose first crossing times are recorded. The run
    /// continues until the largest level is reached.
    pub extra_thresholds: Vec<f64>,
    pub t_max: f64,
    /// Steps between diagnostic trace rows.
    pub trace_stride: usize,
    /// Spacing of stored field snapshots; `None` stores none.
    pub snapshot_dt: Option<f64>,
    pub nonlinear: bool,
    pub dealias: bool,
    /// Overrides the adaptive step with a fixed one.
    pub fixed_dt: Option<f64>,
    /// Steps are capped at `reaction_cfl / max|v|^(p-1)`, a fraction of the
    /// blow-up time of `v' = v^p` from the current peak.
    pub reaction_cfl: f64,
    /// Relative level defining the numerical support of `u`; raised to the
    /// interpolation floor of the data when that is higher.
    pub support_tol: f64,
    /// Steps whose dealiasing tail fraction exceeds this count as
    /// under-resolved and are left out of the support-cone check.
    pub resolution_tol: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            m: 1.0,
            p: 2.0,
            cfl: 0.5,
            v_threshold: 1e6,
            extra_thresholds: Vec::new(),
            t_max: 10.0,
            trace_stride: 10,
            snapshot_dt: None,
            nonlinear: true,
            dealias: true,
            fixed_dt: None,
            reaction_cfl: 0.2,
            support_tol: 1e-4,
            resolution_tol: 1e-4,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, grid: &SpectralGrid) -> Result<()> {
        let bad = |msg: String| Err(SolverError::BadConfig(msg));
        if !(self.m.is_finite() && self.m >= 0.0) {
            return bad(format!("m = {} must be >= 0", self.m));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return bad(format!("p = {} must exceed 1", self.p));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad(format!("cfl = {} must lie in (0, 1)", self.cfl));
        }
        if !(self.v_threshold >= 1e4) || self.extra_thresholds.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return bad("thresholds must be positive and the main one >= 1e4".into());
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("t_max = {} must be positive", self.t_max));
        }
        if self.trace_stride == 0 {
            return bad("trace_stride must be >= 1".into());
        }
        if matches!(self.snapshot_dt, Some(h) if !(h > 0.0)) || matches!(self.fixed_dt, Some(h) if !(h > 0.0)) {
            return bad("snapshot_dt and fixed_dt must be positive".into());
        }
        if !(self.reaction_cfl > 0.0 && self.support_tol > 0.0 && self.support_tol < 1.0 && self.resolution_tol > 0.0) {
            return bad("reaction_cfl and resolution_tol must be positive and support_tol in (0, 1)".into());
        }
        let cone = 1.0 + phase(self.m, self.t_max);
        if cone + 4.0 * grid.spacing() > grid.half_width() {
            return bad(format!(
                "support cone radius {cone:.4} at t_max does not fit in the box of half-width {}",
                grid.half_width()
            ));
        }
        Ok(())
    }

    fn stop_level(&self) -> f64 {
        self.extra_thresholds.iter().copied().fold(self.v_threshold, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    BlownUp,
    HorizonReached,
    StepUnderflow,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::BlownUp => "blown_up",
            Status::HorizonReached => "horizon_reached",
            Status::StepUnderflow => "step_underflow",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_v: f64,
    pub max_u: f64,
    /// `(1/2) ∫ v^2 + t^(2m) |∇u|^2`.
    pub energy: f64,
    pub support_radius: f64,
    /// Spectral energy fraction of `|v|^p` (of `v` for linear runs) outside
    /// the dealiased band; large values mean the run is under-resolved.
    pub tail_fraction: f64,
    /// Largest imaginary part after inverse transforms, relative to the field size.
    pub imag_residue: f64,
}

#[derive(Clone, Debug)]
pub struct SimState {
    pub t: f64,
    pub u_hat: Vec<Complex64>,
    pub v_hat: Vec<Complex64>,
    pub dt: f64,
    pub status: Status,
    pub diag: Diagnostics,
    pub steps: usize,
    /// Level, relative to `max |u|`, above which a point counts as support.
    pub support_level: f64,
}

impl SimState {
    pub fn new(grid: &SpectralGrid, data: &CauchyData, cfg: &SimConfig) -> Self {
        let u_hat = grid.forward(&data.u0());
        let v_hat = grid.forward(&data.v0());
        let floor = interpolation_floor(grid, &u_hat, 1.0).max(interpolation_floor(grid, &v_hat, 1.0));
        let support_level = cfg.support_tol.max(floor);
        let diag = diagnose(grid, cfg, support_level, 0.0, &u_hat, &v_hat);
        SimState { t: 0.0, u_hat, v_hat, dt: 0.0, status: Status::Running, diag, steps: 0, support_level }
    }

    pub fn fields(&self, grid: &SpectralGrid) -> (Vec<f64>, Vec<f64>) {
        (grid.inverse_real(&self.u_hat).0, grid.inverse_real(&self.v_hat).0)
    }
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Largest value of the band-limited interpolant of a field between grid
/// points (quarter and half cell off) beyond `radius` plus two cells,
/// relative to the field's maximum. Support detected below this level is
/// interpolation ringing, not propagation.
pub fn interpolation_floor(grid: &SpectralGrid, spectrum: &[Complex64], radius: f64) -> f64 {
    let dx = grid.spacing();
    let mut worst = 0.0_f64;
    for frac in [0.25, 0.5] {
        let (f, _) = grid.inverse_real(&grid.translate(spectrum, frac * dx));
        let peak = max_abs(&f);
        if peak == 0.0 {
            continue;
        }
        let outside =
            (0..grid.len()).filter(|&i| grid.radius(i) > radius + 2.0 * dx).map(|i| f[i].abs()).fold(0.0, f64::max);
        worst = worst.max(outside / peak);
    }
    worst
}

fn diagnose(
    grid: &SpectralGrid,
    cfg: &SimConfig,
    support_level: f64,
    t: f64,
    u_hat: &[Complex64],
    v_hat: &[Complex64],
) -> Diagnostics {
    let (u, iu) = grid.inverse_real(u_hat);
    let (v, iv) = grid.inverse_real(v_hat);
    let max_u = max_abs(&u);
    let max_v = max_abs(&v);
    let level = support_level * max_u;
    let support_radius = if max_u == 0.0 {
        0.0
    } else {
        u.iter().enumerate().filter(|(_, x)| x.abs() > level).map(|(i, _)| grid.radius(i)).fold(0.0, f64::max)
    };
    let energy = 0.5 * (grid.inner_spectral(v_hat, v_hat) + t.powf(2.0 * cfg.m) * grid.gradient_inner(u_hat, u_hat));
    let rel = |im: f64, scale: f64| if scale > 0.0 { im / scale } else { im };
    let tail_fraction = if cfg.nonlinear {
        let w: Vec<f64> = v.iter().map(|&x| abs_pow(x, cfg.p)).collect();
        grid.tail_fraction(&grid.forward(&w))
    } else {
        grid.tail_fraction(v_hat)
    };
    Diagnostics {
        max_v,
        max_u,
        energy,
        support_radius,
        tail_fraction,
        imag_residue: rel(iu, max_u).max(rel(iv, max_v)),
    }
}

/// Dealiased spectrum of `|v|^p`; zero when the nonlinearity is off.
fn forcing(grid: &SpectralGrid, cfg: &SimConfig, v_hat: &[Complex64]) -> Vec<Complex64> {
    if !cfg.nonlinear {
        return vec![Complex64::default(); v_hat.len()];
    }
    let (v, _) = grid.inverse_real(v_hat);
    let w: Vec<f64> = v.iter().map(|&x| abs_pow(x, cfg.p)).collect();
    let mut w_hat = grid.forward(&w);
    if cfg.dealias {
        for (c, keep) in w_hat.iter_mut().zip(grid.dealias_mask()) {
            if !keep {
                *c = Complex64::default();
            }
        }
    }
    w_hat
}

type Pair = (Vec<Complex64>, Vec<Complex64>);

fn rhs(grid: &SpectralGrid, cfg: &SimConfig, t: f64, u_hat: &[Complex64], v_hat: &[Complex64]) -> Pair {
    let speed2 = t.powf(2.0 * cfg.m);
    let n = forcing(grid, cfg, v_hat);
    let dv = u_hat.iter().zip(grid.k_sq()).zip(n).map(|((u, k2), nl)| -speed2 * k2 * u + nl).collect();
    (v_hat.to_vec(), dv)
}

fn shifted(base: &[Complex64], h: f64, k: &[Complex64]) -> Vec<Complex64> {
    base.iter().zip(k).map(|(b, d)| b + h * d).collect()
}

fn rk4(grid: &SpectralGrid, cfg: &SimConfig, t: f64, dt: f64, u: &[Complex64], v: &[Complex64]) -> Pair {
    let (k1u, k1v) = rhs(grid, cfg, t, u, v);
    let (k2u, k2v) = rhs(grid, cfg, t + 0.5 * dt, &shifted(u, 0.5 * dt, &k1u), &shifted(v, 0.5 * dt, &k1v));
    let (k3u, k3v) = rhs(grid, cfg, t + 0.5 * dt, &shifted(u, 0.5 * dt, &k2u), &shifted(v, 0.5 * dt, &k2v));
    let (k4u, k4v) = rhs(grid, cfg, t + dt, &shifted(u, dt, &k3u), &shifted(v, dt, &k3v));
    let combine = |y: &[Complex64], a: &[Complex64], b: &[Complex64], c: &[Complex64], d: &[Complex64]| {
        (0..y.len()).map(|i| y[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i])).collect::<Vec<_>>()
    };
    (combine(u, &k1u, &k2u, &k3u, &k4u), combine(v, &k1v, &k2v, &k3v, &k4v))
}

/// Step from `t = 0`: exact linear propagation plus a trapezoidal Duhamel
/// correction, avoiding the degenerate coefficient at the origin.
fn first_step(
    grid: &SpectralGrid,
    prop: &Propagator,
    cfg: &SimConfig,
    dt: f64,
    u: &[Complex64],
    v: &[Complex64],
) -> Result<Pair> {
    let (mut u1, v_lin) = linear_evolve_spectral(grid, prop, u, v, dt)?;
    if !cfg.nonlinear {
        return Ok((u1, v_lin));
    }
    let table = grid.radial_symbols(prop, dt)?;
    let n0 = forcing(grid, cfg, v);
    let half = 0.5 * dt;
    let correct = |n1: &[Complex64]| -> Vec<Complex64> {
        (0..v_lin.len()).map(|i| v_lin[i] + half * (table[grid.radial_slot(i)].dv2 * n0[i] + n1[i])).collect()
    };
    let predicted = correct(&n0);
    let n1 = forcing(grid, cfg, &predicted);
    for (i, x) in u1.iter_mut().enumerate() {
        *x += half * table[grid.radial_slot(i)].v2 * n0[i];
    }
    Ok((u1, correct(&n1)))
}

fn choose_dt(grid: &SpectralGrid, cfg: &SimConfig, state: &SimState, stop: f64) -> f64 {
    let mut dt = match cfg.fixed_dt {
        Some(h) => h,
        None => {
            let guess = state.t + cfg.cfl * grid.spacing();
            let mut dt = cfg.cfl * grid.spacing() / guess.powf(cfg.m).max(1.0);
            if cfg.nonlinear && state.diag.max_v > 0.0 {
                dt = dt.min(cfg.reaction_cfl / state.diag.max_v.powf(cfg.p - 1.0));
            }
            dt
        }
    };
    let remaining = stop - state.t;
    // avoid leaving a sliver before the stop time
    if dt >= remaining || remaining - dt < 1e-9 * dt {
        dt = remaining;
    }
    dt
}

/// Advances `state` by one step, never past `stop`.
pub fn nonlinear_step(
    state: &mut SimState,
    grid: &SpectralGrid,
    prop: &Propagator,
    cfg: &SimConfig,
    stop: f64,
) -> Result<()> {
    if state.status != Status::Running {
        return Ok(());
    }
    let dt = choose_dt(grid, cfg, state, stop);
    if dt < MIN_DT && stop - state.t > MIN_DT {
        state.status = Status::StepUnderflow;
        return Ok(());
    }
    let (u, v) = if state.t == 0.0 {
        first_step(grid, prop, cfg, dt, &state.u_hat, &state.v_hat)?
    } else {
        rk4(grid, cfg, state.t, dt, &state.u_hat, &state.v_hat)
    };
    let finite = u.iter().chain(&v).all(|c| c.re.is_finite() && c.im.is_finite());
    if !finite {
        state.status = Status::BlownUp;
        return Ok(());
    }
    let t_new = if (stop - state.t - dt).abs() <= 1e-12 * stop.max(1.0) { stop } else { state.t + dt };
    state.diag = diagnose(grid, cfg, state.support_level, t_new, &u, &v);
    state.u_hat = u;
    state.v_hat = v;
    state.t = t_new;
    state.dt = dt;
    state.steps += 1;
    if !(state.diag.max_v.is_finite() && state.diag.max_u.is_finite()) {
        state.status = Status::BlownUp;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub max_v: f64,
    pub max_u: f64,
    pub support_radius: f64,
    pub dt: f64,
    pub energy: f64,
    pub tail_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub schema_version: u32,
    pub grid: GridSpec,
    pub config: SimConfig,
    pub profile: Profile,
    pub epsilon: f64,
    pub rows: Vec<TraceRow>,
    pub snapshots: Vec<Snapshot>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub threshold: f64,
    pub t: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanRecord {
    pub epsilon: f64,
    pub status: Status,
    /// First time `max |u_t|` reached the main threshold.
    pub t_eps: Option<f64>,
    pub final_t: f64,
    pub max_ut: f64,
    pub crossings: Vec<Crossing>,
    pub steps: usize,
    /// Largest excess of the numerical support over the cone, in cells,
    /// over the resolved steps.
    pub max_cone_excess_cells: f64,
    /// Relative support level actually used.
    pub support_level: f64,
    /// Last time at which the run was resolved.
    pub resolved_until: f64,
    pub max_tail_fraction: f64,
    pub max_imag_residue: f64,
    pub fingerprint: String,
    pub wall_seconds: f64,
}

#[derive(Serialize)]
struct Fingerprint<'a> {
    grid: GridSpec,
    config: &'a SimConfig,
    profile: Profile,
    epsilon: f64,
}

pub fn fingerprint(grid: GridSpec, cfg: &SimConfig, profile: Profile, epsilon: f64) -> String {
    config_hash(&Fingerprint { grid, config: cfg, profile, epsilon })
}

fn row(state: &SimState) -> TraceRow {
    TraceRow {
        t: state.t,
        max_v: state.diag.max_v,
        max_u: state.diag.max_u,
        support_radius: state.diag.support_radius,
        dt: state.dt,
        energy: state.diag.energy,
        tail_fraction: state.diag.tail_fraction,
    }
}

/// Steps until the largest threshold is crossed, `t_max` is reached, or the
/// step size collapses.
pub fn run_until_blowup(grid: &SpectralGrid, data: &CauchyData, cfg: &SimConfig) -> Result<(LifespanRecord, Trace)> {
    cfg.validate(grid)?;
    if data.f.len() != grid.len() || data.g.len() != grid.len() {
        return Err(SolverError::BadData("data arrays do not match the grid".into()));
    }
    let clock = Instant::now();
    let prop = Propagator::new(cfg.m)?;
    let mut state = SimState::new(grid, data, cfg);
    let mut levels: Vec<f64> = std::iter::once(cfg.v_threshold).chain(cfg.extra_thresholds.iter().copied()).collect();
    levels.dedup();
    let mut crossings: Vec<Crossing> = levels.iter().map(|&threshold| Crossing { threshold, t: None }).collect();
    let stop_level = cfg.stop_level();
    let mut rows = vec![row(&state)];
    let mut snapshots = Vec::new();
    let mut next_snap = 0usize;
    let snap_time = |k: usize| cfg.snapshot_dt.map(|h| k as f64 * h);
    let store = |state: &SimState, snapshots: &mut Vec<Snapshot>| {
        let (u, v) = state.fields(grid);
        snapshots.push(Snapshot { t: state.t, u, v });
    };
    if cfg.snapshot_dt.is_some() {
        store(&state, &mut snapshots);
        next_snap = 1;
    }
    let mut excess = (state.diag.support_radius - 1.0) / grid.spacing();
    let mut tail = state.diag.tail_fraction;
    let mut resolved_until = 0.0;
    let mut imag = state.diag.imag_residue;
    let mark = |state: &SimState, crossings: &mut [Crossing]| {
        for c in crossings.iter_mut().filter(|c| c.t.is_none()) {
            if state.diag.max_v >= c.threshold {
                c.t = Some(state.t);
            }
        }
    };
    mark(&state, &mut crossings);
    while state.status == Status::Running {
        if state.diag.max_v >= stop_level {
            state.status = Status::BlownUp;
            break;
        }
        if state.t >= cfg.t_max {
            state.status = Status::HorizonReached;
            break;
        }
        let stop = match snap_time(next_snap) {
            Some(ts) if ts < cfg.t_max => ts,
            _ => cfg.t_max,
        };
        nonlinear_step(&mut state, grid, &prop, cfg, stop)?;
        if state.status != Status::Running {
            break;
        }
        mark(&state, &mut crossings);
        if state.diag.tail_fraction <= cfg.resolution_tol {
            excess = excess.max((state.diag.support_radius - 1.0 - phase(cfg.m, state.t)) / grid.spacing());
            resolved_until = state.t;
        }
        tail = tail.max(state.diag.tail_fraction);
        imag = imag.max(state.diag.imag_residue);
        if matches!(snap_time(next_snap), Some(ts) if state.t >= ts) {
            store(&state, &mut snapshots);
            next_snap += 1;
        }
        if state.steps.is_multiple_of(cfg.trace_stride) {
            rows.push(row(&state));
        }
    }
    if rows.last().map(|r| r.t) != Some(state.t) {
        rows.push(row(&state));
    }
    let record = LifespanRecord {
        epsilon: data.epsilon,
        status: state.status,
        // non-finite fields count as blow-up at the last finite time
        t_eps: crossings[0].t.or((state.status == Status::BlownUp).then_some(state.t)),
        final_t: state.t,
        max_ut: state.diag.max_v,
        crossings,
        steps: state.steps,
        max_cone_excess_cells: excess,
        support_level: state.support_level,
        resolved_until,
        max_tail_fraction: tail,
        max_imag_residue: imag,
        fingerprint: fingerprint(grid.spec(), cfg, data.profile, data.epsilon),
        wall_seconds: clock.elapsed().as_secs_f64(),
    };
    let trace = Trace {
        schema_version: TRACE_SCHEMA_VERSION,
        grid: grid.spec(),
        config: cfg.clone(),
        profile: data.profile,
        epsilon: data.epsilon,
        rows,
        snapshots,
    };
    Ok((record, trace))
}

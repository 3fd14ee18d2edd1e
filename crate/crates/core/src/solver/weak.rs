//! Residual of the weak formulation along a stored run:
//! `eps ∫ g Ψ(0) + ∫∫ |u_t|^p Ψ = -∫∫ u_t Ψ_t + ∫∫ t^(2m) ∇u·∇Ψ`.

use super::data::sample_data;
use super::grid::SpectralGrid;
use super::stepper::Trace;
use super::{abs_pow, Result, SolverError};
use serde::{Deserialize, Serialize};

/// A space-time test function sampled on a grid.
pub trait SpaceTimeTest {
    /// Values of `Ψ(t, ·)` and `Ψ_t(t, ·)` at the grid points.
    fn sample(&self, grid: &SpectralGrid, t: f64) -> (Vec<f64>, Vec<f64>);
}

impl<F> SpaceTimeTest for F
where
    F: Fn([f64; 3], f64) -> (f64, f64),
{
    fn sample(&self, grid: &SpectralGrid, t: f64) -> (Vec<f64>, Vec<f64>) {
        (0..grid.len()).map(|i| self(grid.point(i), t)).unzip()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakResidual {
    /// `eps ∫ g Ψ(0)`.
    pub initial: f64,
    /// `∫∫ |u_t|^p Ψ`, zero for linear runs.
    pub nonlinear: f64,
    /// `-∫∫ u_t Ψ_t`.
    pub time: f64,
    /// `∫∫ t^(2m) ∇u·∇Ψ`.
    pub gradient: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Largest magnitude among the four terms.
    pub scale: f64,
    pub snapshots_used: usize,
}

impl WeakResidual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual.abs() / self.scale
        } else {
            self.residual.abs()
        }
    }
}

/// Evaluates the weak identity on `[0, t_end]` with the trapezoid rule over
/// the trace snapshots and exact spectral quadrature in space. `Ψ` must
/// vanish from `t_end` on.
pub fn weak_residual(trace: &Trace, test: &dyn SpaceTimeTest, t_end: f64) -> Result<WeakResidual> {
    let snaps = &trace.snapshots;
    if snaps.len() < 3 {
        return Err(SolverError::IncompatibleTrace(format!("need at least 3 snapshots, have {}", snaps.len())));
    }
    let h = snaps[1].t - snaps[0].t;
    if snaps[0].t != 0.0 || !(h > 0.0) {
        return Err(SolverError::IncompatibleTrace("snapshots must start at t = 0 with positive spacing".into()));
    }
    for (k, s) in snaps.iter().enumerate() {
        if (s.t - k as f64 * h).abs() > 1e-9 * h.max(s.t) {
            return Err(SolverError::IncompatibleTrace(format!(
                "snapshot {k} at t = {} breaks uniform spacing {h}",
                s.t
            )));
        }
    }
    let used = snaps.iter().take_while(|s| s.t <= t_end + 1e-9 * h).count();
    let reached = snaps[used - 1].t;
    if (reached - t_end).abs() > 1e-9 * h.max(t_end) {
        return Err(SolverError::IncompatibleTrace(format!(
            "t_end = {t_end} is not a snapshot time (trace reaches {})",
            snaps[snaps.len() - 1].t
        )));
    }
    let grid = SpectralGrid::new(trace.grid)?;
    let m = trace.config.m;
    let data = sample_data(&grid, trace.profile, trace.epsilon, m)?;
    let (psi0, _) = test.sample(&grid, 0.0);
    let initial = grid.integrate(&data.v0().iter().zip(&psi0).map(|(g, q)| g * q).collect::<Vec<_>>());

    let (mut nonlinear, mut time, mut gradient) = (0.0, 0.0, 0.0);
    for (k, s) in snaps[..used].iter().enumerate() {
        if s.u.len() != grid.len() || s.v.len() != grid.len() {
            return Err(SolverError::IncompatibleTrace(format!("snapshot {k} does not match the grid")));
        }
        let w = if k == 0 || k == used - 1 { 0.5 * h } else { h };
        let (psi, psi_t) = test.sample(&grid, s.t);
        if trace.config.nonlinear {
            let nl: Vec<f64> = s.v.iter().zip(&psi).map(|(v, q)| abs_pow(*v, trace.config.p) * q).collect();
            nonlinear += w * grid.integrate(&nl);
        }
        let vt: Vec<f64> = s.v.iter().zip(&psi_t).map(|(v, q)| -v * q).collect();
        time += w * grid.integrate(&vt);
        let speed2 = s.t.powf(2.0 * m);
        if speed2 != 0.0 {
            gradient += w * speed2 * grid.gradient_inner(&grid.forward(&s.u), &grid.forward(&psi));
        }
    }
    let lhs = initial + nonlinear;
    let rhs = time + gradient;
    let scale = [initial, nonlinear, time, gradient].iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    Ok(WeakResidual { initial, nonlinear, time, gradient, lhs, rhs, residual: lhs - rhs, scale, snapshots_used: used })
}

//! Test-function machinery for the blow-up argument: time cutoffs, the
//! harmonic weight `φ` with `Δφ = φ`, the space-time test function and the
//! averaged functional `Y(M)` built on top of them.
//!
//! The cutoff profile is pinned to `η(r) = S(2r - 1)` where `S` is
//! [`smooth_step`]: `η = 1` on `[0, 1/2]`, `η = 0` on `[1, ∞)` and C^∞ in
//! between. Every derived constant (`‖η'‖∞`, `‖ηη''‖∞`) refers to this profile.

pub mod functional;

pub use functional::{
    check_key_inequality, cutoff_integral, data_constant, functional_y, functional_y_prime, IntermediateSides,
    KeyInequalityReport, KeyInequalityRow, TimeSeries,
};

use crate::aux_ode::{phase, AuxError, AuxOde};
use crate::cutoff::{smooth_step, smooth_step_deriv, smooth_step_second};
use crate::solver::{SolverError, SpaceTimeTest, SpectralGrid};
use crate::specfun::{bessel_i, bessel_i_scaled, SpecFunError};
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlowupError {
    #[error("blowup: harmonic weight only implemented for n in {{1, 2, 3}}, got {0}")]
    UnsupportedDim(usize),
    #[error("blowup: cutoff scale M = {0} must exceed 1")]
    BadScale(f64),
    #[error("blowup: power p = {0} must exceed 1")]
    BadPower(f64),
    #[error("blowup: M = {scale} outside ({lo}, {hi}]")]
    ScaleOutOfRange { scale: f64, lo: f64, hi: f64 },
    #[error("blowup: bad time series: {0}")]
    BadSeries(String),
    #[error("blowup: trace too coarse at M = {scale}: quadrature error {error:e} exceeds 10% of {side:e}")]
    CoarseTrace { scale: f64, error: f64, side: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Aux(#[from] AuxError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, BlowupError>;

pub fn eta(r: f64) -> f64 {
    smooth_step(2.0 * r - 1.0)
}

pub fn eta_deriv(r: f64) -> f64 {
    2.0 * smooth_step_deriv(2.0 * r - 1.0)
}

pub fn eta_second(r: f64) -> f64 {
    4.0 * smooth_step_second(2.0 * r - 1.0)
}

/// `η` cut off below `1/2`.
pub fn theta(r: f64) -> f64 {
    if r < 0.5 {
        0.0
    } else {
        eta(r)
    }
}

fn sup_on_bridge(f: impl Fn(f64) -> f64) -> f64 {
    let n = 20_000;
    let h = 0.5 / n as f64;
    let (mut best, mut arg) = (0.0_f64, 0.75);
    for k in 1..n {
        let r = 0.5 + k as f64 * h;
        let v = f(r).abs();
        if v > best {
            best = v;
            arg = r;
        }
    }
    // golden-section polish inside the winning cell pair
    let (mut a, mut b) = (arg - h, arg + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c).abs() > f(d).abs() {
            b = d;
        } else {
            a = c;
        }
    }
    best.max(f(0.5 * (a + b)).abs())
}

/// `(‖η'‖∞, ‖η η''‖∞)` for the pinned profile.
pub fn eta_sup_norms() -> (f64, f64) {
    static NORMS: OnceLock<(f64, f64)> = OnceLock::new();
    *NORMS.get_or_init(|| (sup_on_bridge(eta_deriv), sup_on_bridge(|r| eta(r) * eta_second(r))))
}

/// The time cutoffs `η_M = η(·/M)`, `θ_M = θ(·/M)` and the weight
/// `E = η_M^{2p'}` with its first two derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cutoffs {
    scale: f64,
    p: f64,
    power: f64,
}

impl Cutoffs {
    pub fn new(scale: f64, p: f64) -> Result<Self> {
        if !(scale > 1.0 && scale.is_finite()) {
            return Err(BlowupError::BadScale(scale));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(BlowupError::BadPower(p));
        }
        Ok(Cutoffs { scale, p, power: 2.0 * p / (p - 1.0) })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `2p'`.
    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn eta_m(&self, t: f64) -> f64 {
        eta(t / self.scale)
    }

    pub fn theta_m(&self, t: f64) -> f64 {
        theta(t / self.scale)
    }

    pub fn weight(&self, t: f64) -> f64 {
        self.eta_m(t).powf(self.power)
    }

    pub fn weight_dt(&self, t: f64) -> f64 {
        let r = t / self.scale;
        let e = eta(r);
        if e == 0.0 {
            return 0.0;
        }
        self.power * e.powf(self.power - 1.0) * eta_deriv(r) / self.scale
    }

    pub fn weight_dtt(&self, t: f64) -> f64 {
        let r = t / self.scale;
        let e = eta(r);
        if e == 0.0 {
            return 0.0;
        }
        let k = self.power;
        let d1 = eta_deriv(r);
        let lead = (k - 1.0) * e.powf(k - 2.0) * d1 * d1 + e.powf(k - 1.0) * eta_second(r);
        k * lead / (self.scale * self.scale)
    }

    /// Pointwise majorant of `|E'|` in terms of `θ_M^{2p'/p}`.
    pub fn weight_dt_bound(&self, t: f64) -> f64 {
        let (d1, _) = eta_sup_norms();
        self.power / self.scale * d1 * self.theta_m(t).powf(self.power / self.p)
    }

    /// Pointwise majorant of `|E''|` in terms of `θ_M^{2p'/p}`.
    pub fn weight_dtt_bound(&self, t: f64) -> f64 {
        let (d1, d2) = eta_sup_norms();
        let k = self.power;
        k / (self.scale * self.scale) * ((k - 1.0) * d1 * d1 + d2) * self.theta_m(t).powf(k / self.p)
    }
}

/// `φ(x)` for `|x| = radius`: `2 cosh`, `2π I0` and `4π sinh(r)/r` in one,
/// two and three dimensions.
pub fn phi_harmonic(dim: usize, radius: f64) -> Result<f64> {
    let r = radius.abs();
    match dim {
        1 => Ok(2.0 * r.cosh()),
        2 => Ok(2.0 * PI * bessel_i(0.0, r)?),
        3 if r < 1e-4 => Ok(4.0 * PI * (1.0 + r * r / 6.0)),
        3 => Ok(4.0 * PI * r.sinh() / r),
        _ => Err(BlowupError::UnsupportedDim(dim)),
    }
}

/// `e^{-|x|} φ(x)`, bounded for every radius.
pub fn phi_harmonic_scaled(dim: usize, radius: f64) -> Result<f64> {
    let r = radius.abs();
    match dim {
        1 => Ok(1.0 + (-2.0 * r).exp()),
        2 => Ok(2.0 * PI * bessel_i_scaled(0.0, r)?),
        3 if r < 1e-4 => Ok(4.0 * PI * (1.0 + r * r / 6.0) * (-r).exp()),
        3 => Ok(-4.0 * PI * (-2.0 * r).exp_m1() / (2.0 * r)),
        _ => Err(BlowupError::UnsupportedDim(dim)),
    }
}

/// `Ψ(t, x) = -t^{-2m} ∂_t(E λ)(t) φ(x) η⁰(t, x)` with `λ` the decaying
/// solution of the auxiliary ODE and `η⁰ = η(|x| / (2 γ(t)))` a cutoff that
/// equals 1 on the light cone `|x| <= γ(t) = 1 + phase(t)`.
#[derive(Clone, Debug)]
pub struct TestFunction {
    dim: usize,
    cutoffs: Cutoffs,
    aux: AuxOde,
}

impl TestFunction {
    pub fn new(m: f64, p: f64, scale: f64, dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(BlowupError::UnsupportedDim(dim));
        }
        Ok(TestFunction { dim, cutoffs: Cutoffs::new(scale, p)?, aux: AuxOde::new(m)? })
    }

    pub fn m(&self) -> f64 {
        self.aux.m()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoffs(&self) -> &Cutoffs {
        &self.cutoffs
    }

    pub fn cone(&self, t: f64) -> f64 {
        1.0 + phase(self.m(), t)
    }

    pub fn cone_cutoff(&self, t: f64, radius: f64) -> f64 {
        eta(radius / (2.0 * self.cone(t)))
    }

    /// `e^{phase(t)} (A(t), A'(t))` where `A = -t^{-2m} ∂_t(E λ)` is the
    /// time factor of `Ψ`.
    pub fn time_factor_scaled(&self, t: f64) -> Result<(f64, f64)> {
        let c = &self.cutoffs;
        if t >= c.scale() {
            return Ok((0.0, 0.0));
        }
        let m = self.m();
        let e = c.weight(t);
        let (e1, e2) = (c.weight_dt(t), c.weight_dtt(t));
        let (lam, _) = self.aux.decaying_scaled(t)?;
        let slope_w = self.aux.deriv_over_weight_scaled(t)?;
        if e1 == 0.0 && e2 == 0.0 {
            // λ'' = (2m/t) λ' + t^{2m} λ collapses A' to -E λ on the flat part
            return Ok((-e * slope_w, -e * lam));
        }
        let tw = t.powf(-2.0 * m);
        let value = -(e1 * lam * tw + e * slope_w);
        let deriv = 2.0 * m / t * e1 * lam * tw - (e2 * lam * tw + 2.0 * e1 * slope_w) - e * lam;
        Ok((value, deriv))
    }

    pub fn time_factor(&self, t: f64) -> Result<f64> {
        Ok(self.time_factor_scaled(t)?.0 * (-phase(self.m(), t)).exp())
    }

    /// `(Ψ, Ψ_t)` at time `t` and radius `|x|`.
    pub fn value_and_dt(&self, t: f64, radius: f64) -> Result<(f64, f64)> {
        let cut = self.cone_cutoff(t, radius);
        if cut == 0.0 || t >= self.cutoffs.scale() {
            return Ok((0.0, 0.0));
        }
        let (a, da) = self.time_factor_scaled(t)?;
        let gamma = self.cone(t);
        let rho = radius / (2.0 * gamma);
        let cut_dt = eta_deriv(rho) * (-rho * t.powf(self.m()) / gamma);
        let w = phi_harmonic_scaled(self.dim, radius)? * (radius - phase(self.m(), t)).exp();
        Ok((a * cut * w, (da * cut + a * cut_dt) * w))
    }

    pub fn value(&self, t: f64, radius: f64) -> Result<f64> {
        Ok(self.value_and_dt(t, radius)?.0)
    }
}

impl SpaceTimeTest for TestFunction {
    fn sample(&self, grid: &SpectralGrid, t: f64) -> (Vec<f64>, Vec<f64>) {
        (0..grid.len())
            .map(|i| {
                self.value_and_dt(t, grid.radius(i))
                    .expect("blowup: test function evaluated at a negative or non-finite time")
            })
            .unzip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_pins() {
        assert_eq!(eta(0.3), 1.0);
        assert_eq!(eta(1.2), 0.0);
        assert_eq!(theta(0.3), 0.0);
        assert_eq!(theta(0.7), eta(0.7));
    }

    #[test]
    fn weight_derivatives_match_differences() {
        let c = Cutoffs::new(5.0, 2.0).unwrap();
        for t in [2.6, 3.3, 4.1, 4.8] {
            let h = 1e-5;
            let fd = (c.weight(t + h) - c.weight(t - h)) / (2.0 * h);
            assert!((fd - c.weight_dt(t)).abs() < 1e-7);
            let fd2 = (c.weight_dt(t + h) - c.weight_dt(t - h)) / (2.0 * h);
            assert!((fd2 - c.weight_dtt(t)).abs() < 1e-6);
        }
    }

    #[test]
    fn unsupported_dimension() {
        assert_eq!(phi_harmonic(4, 1.0), Err(BlowupError::UnsupportedDim(4)));
        assert!(TestFunction::new(1.0, 2.0, 3.0, 0).is_err());
    }
}

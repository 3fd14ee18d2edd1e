//! Fourier symbols of the linear Tricomi propagator.
//!
//! For a mode with radial frequency `r`, `v1` and `v2` are the solutions of
//! `y'' + t^(2m) r^2 y = 0` with data `(1, 0)` and `(0, 1)` at `t = 0`. They
//! are confluent hypergeometric functions of `z = 2i phase(t) r`.

use crate::aux_ode::{mu_of, phase};
use crate::ode::{self, OdeError};
use crate::specfun::{kummer_phi_with, SpecFunConfig, SpecFunError};
use num_complex::Complex64;
use thiserror::Error;

/// Below this `m` the closed wave forms replace the hypergeometric ones.
pub const WAVE_LIMIT_M: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagatorError {
    #[error("propagator: m = {0} must be finite and non-negative")]
    BadOrder(f64),
    #[error("propagator: need t >= 0 and r >= 0, got t = {t}, r = {r}")]
    BadMode { t: f64, r: f64 },
    #[error("propagator: kernel needs 0 <= s <= t, got s = {s}, t = {t}")]
    BadKernelTimes { s: f64, t: f64 },
    #[error("propagator: sigma = {sigma} outside [{lo}, {hi}] for {kind}")]
    InadmissibleSigma { kind: &'static str, sigma: f64, lo: f64, hi: f64 },
    #[error("propagator: bound grid {0} must be non-empty, finite and positive")]
    BadGrid(&'static str),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

pub type Result<T> = std::result::Result<T, PropagatorError>;

/// `(V1, V2, dV1/dt, dV2/dt)` at one `(t, r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeSymbols {
    pub v1: Complex64,
    pub v2: Complex64,
    pub dv1: Complex64,
    pub dv2: Complex64,
}

impl ModeSymbols {
    pub fn wronskian(&self) -> Complex64 {
        self.v1 * self.dv2 - self.v2 * self.dv1
    }

    fn real(v1: f64, v2: f64, dv1: f64, dv2: f64) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        ModeSymbols { v1: c(v1), v2: c(v2), dv1: c(dv1), dv2: c(dv2) }
    }
}

/// Duhamel kernel pieces `W1 = V1(t)V2(s)`, `W2 = V2(t)V1(s)` and their
/// t-derivatives. The kernel acting on the forcing is `W2 - W1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSymbols {
    pub w1: Complex64,
    pub w2: Complex64,
    pub dw1: Complex64,
    pub dw2: Complex64,
}

impl KernelSymbols {
    pub fn duhamel(&self) -> Complex64 {
        self.w2 - self.w1
    }

    pub fn duhamel_dt(&self) -> Complex64 {
        self.dw2 - self.dw1
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Propagator {
    m: f64,
    mu: f64,
    cfg: SpecFunConfig,
}

impl Propagator {
    pub fn new(m: f64) -> Result<Self> {
        Self::with_config(m, SpecFunConfig::DEFAULT)
    }

    pub fn with_config(m: f64, cfg: SpecFunConfig) -> Result<Self> {
        if !(m.is_finite() && m >= 0.0) {
            return Err(PropagatorError::BadOrder(m));
        }
        Ok(Propagator { m, mu: mu_of(m), cfg })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn symbols(&self, t: f64, r: f64) -> Result<ModeSymbols> {
        if !(t >= 0.0 && r >= 0.0 && t.is_finite() && r.is_finite()) {
            return Err(PropagatorError::BadMode { t, r });
        }
        if t == 0.0 || r == 0.0 {
            return Ok(ModeSymbols::real(1.0, t, 0.0, 1.0));
        }
        if self.m < WAVE_LIMIT_M {
            let (s, c) = (t * r).sin_cos();
            return Ok(ModeSymbols::real(c, s / r, -r * s, c));
        }
        let m = self.m;
        let mu = self.mu;
        let z = Complex64::new(0.0, 2.0 * phase(m, t) * r);
        let half = (-0.5 * z).exp();
        let phi = |a: f64, c: f64| kummer_phi_with(&self.cfg, a, c, z);
        let p_a = phi(mu, 2.0 * mu)?;
        let p_b = phi(mu + 1.0, 2.0 * mu + 1.0)?;
        let p_c = phi(1.0 - mu, 2.0 - 2.0 * mu)?;
        let p_d = phi(1.0 - mu, 1.0 - 2.0 * mu)?;
        let k = 0.5 * (m + 1.0);
        Ok(ModeSymbols {
            v1: half * p_a,
            v2: t * half * p_c,
            // k z / t = i t^m r, finite as t -> 0
            dv1: Complex64::new(0.0, t.powf(m) * r) * half * (p_b - p_a),
            dv2: half * (p_d - k * z * p_c),
        })
    }

    pub fn kernel(&self, s: f64, t: f64, r: f64) -> Result<KernelSymbols> {
        if !(s >= 0.0 && s <= t) {
            return Err(PropagatorError::BadKernelTimes { s, t });
        }
        let at_t = self.symbols(t, r)?;
        let at_s = self.symbols(s, r)?;
        Ok(kernel_from(&at_t, &at_s))
    }

    /// Fundamental pair `(y1, y2, y1', y2')` at `t1` by direct integration of
    /// the mode equation, seeded with four Taylor terms at a small `t0`.
    pub fn mode_oracle(&self, r: f64, t1: f64, tol: f64) -> Result<[f64; 4]> {
        if !(r >= 0.0 && t1 > 0.0) {
            return Err(PropagatorError::BadMode { t: t1, r });
        }
        let m = self.m;
        let t0 = (0.01f64).min(t1 / 100.0);
        let period = 2.0 * m + 2.0;
        let seed = |offset: f64| -> (f64, f64) {
            let (mut y, mut yp) = (0.0, 0.0);
            let mut c = 1.0;
            for k in 0..4 {
                let e = period * k as f64 + offset;
                if k > 0 {
                    c *= -r * r / (e * (e - 1.0));
                }
                y += c * t0.powf(e);
                if e > 0.0 {
                    yp += c * e * t0.powf(e - 1.0);
                }
            }
            (y, yp)
        };
        let rhs = |t: f64, y: &[f64; 2]| [y[1], -t.powf(2.0 * m) * r * r * y[0]];
        let (a, ap) = seed(0.0);
        let (b, bp) = seed(1.0);
        let first = ode::integrate(rhs, t0, [a, ap], t1, tol)?;
        let second = ode::integrate(rhs, t0, [b, bp], t1, tol)?;
        Ok([first[0], second[0], first[1], second[1]])
    }
}

pub(crate) fn kernel_from(at_t: &ModeSymbols, at_s: &ModeSymbols) -> KernelSymbols {
    KernelSymbols { w1: at_t.v1 * at_s.v2, w2: at_t.v2 * at_s.v1, dw1: at_t.dv1 * at_s.v2, dw2: at_t.dv2 * at_s.v1 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wave_closed_forms() {
        let p = Propagator::new(0.0).unwrap();
        let s = p.symbols(1.0, 3.0).unwrap();
        assert!((s.v1.re - 3f64.cos()).abs() < 1e-15);
        assert!((s.v2.re - 3f64.sin() / 3.0).abs() < 1e-15);
        let s = p.symbols(0.7, 2.0).unwrap();
        assert!((s.dv1.re + 2.0 * 1.4f64.sin()).abs() < 1e-15);
        assert!((s.dv2.re - 1.4f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn zero_frequency_and_zero_time() {
        for m in [0.0, 0.5, 2.0] {
            let p = Propagator::new(m).unwrap();
            assert_eq!(p.symbols(1.7, 0.0).unwrap(), ModeSymbols::real(1.0, 1.7, 0.0, 1.0));
            assert_eq!(p.symbols(0.0, 5.0).unwrap(), ModeSymbols::real(1.0, 0.0, 0.0, 1.0));
        }
    }

    #[test]
    fn kernel_vanishes_on_the_diagonal() {
        let p = Propagator::new(1.0).unwrap();
        for r in [0.3, 4.0, 60.0] {
            let k = p.kernel(1.2, 1.2, r).unwrap();
            assert_eq!(k.duhamel(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn kernel_rejects_reversed_times() {
        let p = Propagator::new(1.0).unwrap();
        assert!(matches!(p.kernel(2.0, 1.0, 1.0), Err(PropagatorError::BadKernelTimes { .. })));
    }

    #[test]
    fn wave_kernel_is_shifted_sine() {
        let p = Propagator::new(0.0).unwrap();
        let k = p.kernel(0.5, 1.0, 2.0).unwrap();
        assert!((k.duhamel().re - 1f64.sin() / 2.0).abs() < 1e-15);
    }
}

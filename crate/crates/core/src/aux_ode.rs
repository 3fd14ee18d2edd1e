//! The auxiliary ODE `y'' - (2m/t) y' - t^(2m) y = 0` on `t > 0`.
//!
//! Its solutions are `t^(m+1/2)` times modified Bessel functions of order
//! `nu = 1/2 + mu`, `mu = m / (2(m+1))`, evaluated at the phase
//! `t^(m+1)/(m+1)`. The decaying solution built from `K_nu` is the time
//! weight of the blow-up test function.

use crate::ode::{self, OdeError};
use crate::specfun::{self, bessel_i_scaled, bessel_k_pair_scaled, gamma, sin_pi, SpecFunError};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuxError {
    #[error("aux_ode: m = {0} must be finite and non-negative")]
    BadOrder(f64),
    #[error("aux_ode: t = {0} must be {1}")]
    BadTime(f64, &'static str),
    #[error("aux_ode: power series needs integer m, got {0}")]
    NonIntegerOrder(f64),
    #[error("aux_ode: recursive coefficient a_{h} = {recursive:e} disagrees with closed form {closed:e}")]
    CoefficientMismatch { h: usize, recursive: f64, closed: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

pub type Result<T> = std::result::Result<T, AuxError>;

/// `mu = m / (2(m+1))`.
pub fn mu_of(m: f64) -> f64 {
    m / (2.0 * (m + 1.0))
}

/// Phase `t^(m+1)/(m+1)`; the support cone has radius `1 + phase`.
pub fn phase(m: f64, t: f64) -> f64 {
    t.powf(m + 1.0) / (m + 1.0)
}

/// `c0(s) = 2^(s-1/2) (m+1)^(s+1/2) Gamma(s+1/2)` for `s = +mu` or `s = -mu`.
/// `c0(mu)` is the value of the decaying solution at the origin and
/// `-c0(-mu)` the limit of its derivative divided by `t^(2m)`.
pub fn origin_constant(m: f64, s: f64) -> Result<f64> {
    Ok(2f64.powf(s - 0.5) * (m + 1.0).powf(s + 0.5) * gamma(s + 0.5)?)
}

/// `a(m) = c0(mu) / c0(-mu)`, the weight in the data positivity condition.
pub fn data_weight(m: f64) -> Result<f64> {
    let mu = mu_of(m);
    Ok((2.0 * (m + 1.0)).powf(m / (m + 1.0)) * gamma(0.5 + mu)? / gamma(0.5 - mu)?)
}

#[derive(Clone, Copy, Debug)]
pub struct AuxOde {
    m: f64,
    mu: f64,
}

impl AuxOde {
    pub fn new(m: f64) -> Result<Self> {
        if !(m.is_finite() && m >= 0.0) {
            return Err(AuxError::BadOrder(m));
        }
        Ok(AuxOde { m, mu: mu_of(m) })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    fn order(&self) -> f64 {
        0.5 + self.mu
    }

    fn check_t(t: f64) -> Result<()> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(AuxError::BadTime(t, "finite and non-negative"));
        }
        Ok(())
    }

    /// `e^phase (lambda, lambda')` for the decaying solution
    /// `t^(m+1/2) K_nu(phase)`; stays representable long after `lambda`
    /// underflows.
    pub fn decaying_scaled(&self, t: f64) -> Result<(f64, f64)> {
        Self::check_t(t)?;
        if t == 0.0 {
            let slope = if self.m == 0.0 { -origin_constant(0.0, 0.0)? } else { 0.0 };
            return Ok((origin_constant(self.m, self.mu)?, slope));
        }
        let z = phase(self.m, t);
        // one Temme/Steed call yields K_{1-nu} and K_nu together
        let (k_low, k_nu) = bessel_k_pair_scaled(self.order() - 1.0, z)?;
        let value = t.powf(self.m + 0.5) * k_nu;
        let slope = -t.powf(2.0 * self.m + 0.5) * k_low;
        Ok((value, slope))
    }

    /// `(lambda, lambda')` for the decaying solution.
    pub fn decaying(&self, t: f64) -> Result<(f64, f64)> {
        let (v, s) = self.decaying_scaled(t)?;
        let w = (-phase(self.m, t)).exp();
        Ok((v * w, s * w))
    }

    /// `e^-phase (lambda, lambda')` for the growing solution `t^(m+1/2) I_nu(phase)`.
    pub fn growing_scaled(&self, t: f64) -> Result<(f64, f64)> {
        Self::check_t(t)?;
        if t == 0.0 {
            return Ok((0.0, 0.0));
        }
        let z = phase(self.m, t);
        let nu = self.order();
        let value = t.powf(self.m + 0.5) * bessel_i_scaled(nu, z)?;
        let slope = t.powf(2.0 * self.m + 0.5) * bessel_i_scaled(nu - 1.0, z)?;
        Ok((value, slope))
    }

    /// `(lambda, lambda')` for the growing solution.
    pub fn growing(&self, t: f64) -> Result<(f64, f64)> {
        let (v, s) = self.growing_scaled(t)?;
        let w = phase(self.m, t).exp();
        Ok((v * w, s * w))
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(self.decaying(t)?.0)
    }

    pub fn deriv(&self, t: f64) -> Result<f64> {
        Ok(self.decaying(t)?.1)
    }

    /// `lambda'(t) / t^(2m)`, finite down to `t = 0` where it equals `-c0(-mu)`.
    pub fn deriv_over_weight(&self, t: f64) -> Result<f64> {
        Ok(self.deriv_over_weight_scaled(t)? * (-phase(self.m, t)).exp())
    }

    /// `e^phase lambda'(t) / t^(2m)`.
    pub fn deriv_over_weight_scaled(&self, t: f64) -> Result<f64> {
        Self::check_t(t)?;
        if t == 0.0 {
            return Ok(-origin_constant(self.m, -self.mu)?);
        }
        let z = phase(self.m, t);
        let (k_low, _) = bessel_k_pair_scaled(self.order() - 1.0, z)?;
        Ok(-t.sqrt() * k_low)
    }

    /// `e^phase lambda''`, from the Bessel derivative rather than the ODE.
    pub fn second_deriv_scaled(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(AuxError::BadTime(t, "positive"));
        }
        let m = self.m;
        let z = phase(m, t);
        let low = 1.0 - self.order();
        let (k_low, k_next) = bessel_k_pair_scaled(low, z)?;
        let dk = -k_next + low / z * k_low;
        Ok(-(2.0 * m + 0.5) * t.powf(2.0 * m - 0.5) * k_low - t.powf(3.0 * m + 0.5) * dk)
    }

    pub fn second_deriv(&self, t: f64) -> Result<f64> {
        Ok(self.second_deriv_scaled(t)? * (-phase(self.m, t)).exp())
    }

    /// Relative residual of the ODE for the decaying solution.
    pub fn residual(&self, t: f64) -> Result<f64> {
        // the ODE is linear, so the common factor e^-phase drops out
        let (y, yp) = self.decaying_scaled(t)?;
        let ypp = self.second_deriv_scaled(t)?;
        let w = t.powf(2.0 * self.m);
        let drift = 2.0 * self.m / t * yp;
        let scale = ypp.abs() + drift.abs() + w * y.abs();
        Ok((ypp - drift - w * y).abs() / scale)
    }

    /// `lambda_- lambda_+' - lambda_+ lambda_-'`.
    pub fn wronskian(&self, t: f64) -> Result<f64> {
        let (a, ap) = self.decaying_scaled(t)?;
        let (b, bp) = self.growing_scaled(t)?;
        Ok(a * bp - b * ap)
    }

    /// The closed-form Wronskian `(m+1) t^(2m)`.
    pub fn wronskian_exact(&self, t: f64) -> f64 {
        (self.m + 1.0) * t.powf(2.0 * self.m)
    }

    /// Leading large-t behaviour `sqrt((m+1) pi/2) t^(m/2) e^(-phase)`.
    pub fn large_time_profile(&self, t: f64) -> f64 {
        ((self.m + 1.0) * PI / 2.0).sqrt() * t.powf(0.5 * self.m) * (-phase(self.m, t)).exp()
    }

    /// Numerical solution of the ODE from `(t0, y0, yp0)` to `t1`, both
    /// times strictly positive.
    pub fn integrate(&self, t0: f64, y0: f64, yp0: f64, t1: f64, tol: f64) -> Result<(f64, f64)> {
        if !(t0 > 0.0 && t1 > 0.0) {
            return Err(AuxError::BadTime(t0.min(t1), "positive at both ends of the integration"));
        }
        let m = self.m;
        let rhs = |t: f64, y: &[f64; 2]| [y[1], 2.0 * m / t * y[1] + t.powf(2.0 * m) * y[0]];
        let out = ode::integrate(rhs, t0, [y0, yp0], t1, tol)?;
        Ok((out[0], out[1]))
    }
}

/// Power-series solution for integer `m`:
/// `sum_h a_h t^h` with `a_1..a_{2m}` zero and `a_h = a_{h-2m-2} / (h (h-2m-1))`.
#[derive(Clone, Debug)]
pub struct PowerSeries {
    m: u32,
    a0: f64,
    a_lead: f64,
}

impl PowerSeries {
    /// `a0` and `a_lead = a_{2m+1}` are the two free coefficients.
    pub fn new(m: f64, a0: f64, a_lead: f64) -> Result<Self> {
        if !(m >= 0.0 && m == m.floor() && m < 1e6) {
            return Err(AuxError::NonIntegerOrder(m));
        }
        Ok(PowerSeries { m: m as u32, a0, a_lead })
    }

    fn nu(&self) -> f64 {
        let m = self.m as f64;
        (m + 0.5) / (m + 1.0)
    }

    /// `c_-` and `c_+` linking the series to `t^(m+1/2) I_{-+nu}(phase)`.
    pub fn bessel_constants(&self) -> Result<(f64, f64)> {
        let nu = self.nu();
        let base = 2.0 * (self.m as f64 + 1.0);
        Ok((gamma(1.0 - nu)? * base.powf(-nu), gamma(1.0 + nu)? * base.powf(nu)))
    }

    /// Coefficients reproducing the decaying solution.
    pub fn decaying(m: f64) -> Result<Self> {
        let probe = PowerSeries::new(m, 0.0, 0.0)?;
        let (cm, cp) = probe.bessel_constants()?;
        let k = 0.5 * PI / sin_pi(probe.nu());
        PowerSeries::new(m, k / cm, -k / cp)
    }

    /// Coefficients reproducing the growing solution.
    pub fn growing(m: f64) -> Result<Self> {
        let probe = PowerSeries::new(m, 0.0, 0.0)?;
        let (_, cp) = probe.bessel_constants()?;
        PowerSeries::new(m, 0.0, 1.0 / cp)
    }

    pub fn coeff_recursive(&self, h: usize) -> f64 {
        let period = 2 * self.m as usize + 2;
        let lead = 2 * self.m as usize + 1;
        let (mut idx, mut a) = match h % period {
            0 => (0, self.a0),
            r if r == lead => (lead, self.a_lead),
            _ => return 0.0,
        };
        while idx < h {
            idx += period;
            a /= (idx * (idx - lead)) as f64;
        }
        a
    }

    pub fn coeff_closed(&self, h: usize) -> Result<f64> {
        let period = 2 * self.m as usize + 2;
        let lead = 2 * self.m as usize + 1;
        let nu = self.nu();
        let base = (period as f64).powi(-2);
        let k = (h / period) as i32;
        let kf = k as f64;
        let kfact = gamma(kf + 1.0)?;
        match h % period {
            0 => Ok(base.powi(k) * gamma(1.0 - nu)? / (kfact * gamma(kf + 1.0 - nu)?) * self.a0),
            r if r == lead => Ok(base.powi(k) * gamma(1.0 + nu)? / (kfact * gamma(kf + 1.0 + nu)?) * self.a_lead),
            _ => Ok(0.0),
        }
    }

    /// `a_h`, checked against the Gamma closed form to 1e-12 relative.
    pub fn coeff(&self, h: usize) -> Result<f64> {
        let recursive = self.coeff_recursive(h);
        let closed = self.coeff_closed(h)?;
        if (recursive - closed).abs() > 1e-12 * closed.abs().max(f64::MIN_POSITIVE) {
            return Err(AuxError::CoefficientMismatch { h, recursive, closed });
        }
        Ok(recursive)
    }

    /// The first `n_terms` nonzero terms of each of the two subseries.
    pub fn partial_sum(&self, t: f64, n_terms: usize) -> f64 {
        let period = 2 * self.m as usize + 2;
        let lead = 2 * self.m as usize + 1;
        let mut sum = 0.0;
        for start in [0, lead] {
            let mut a = if start == 0 { self.a0 } else { self.a_lead };
            let mut idx = start;
            for _ in 0..n_terms {
                sum += a * t.powi(idx as i32);
                idx += period;
                a /= (idx * (idx - lead)) as f64;
            }
        }
        sum
    }

    /// Truncated series, summed until the tail is negligible.
    pub fn eval(&self, t: f64) -> f64 {
        let period = 2 * self.m as usize + 2;
        let lead = 2 * self.m as usize + 1;
        let step = t.powi(period as i32);
        let mut sum = 0.0;
        for start in [0, lead] {
            let mut a = if start == 0 { self.a0 } else { self.a_lead };
            let mut idx = start;
            let mut power = t.powi(idx as i32);
            for _ in 0..200 {
                let term = a * power;
                sum += term;
                if term.abs() <= 1e-18 * sum.abs() {
                    break;
                }
                idx += period;
                a /= (idx * (idx - lead)) as f64;
                power *= step;
            }
        }
        sum
    }

    /// The same function through `c_- a0 t^(m+1/2) I_{-nu} + c_+ a_lead t^(m+1/2) I_nu`.
    pub fn bessel_form(&self, t: f64) -> Result<f64> {
        let m = self.m as f64;
        let (cm, cp) = self.bessel_constants()?;
        let z = phase(m, t);
        let nu = self.nu();
        let w = t.powf(m + 0.5);
        Ok(cm * self.a0 * w * specfun::bessel_i(-nu, z)? + cp * self.a_lead * w * specfun::bessel_i(nu, z)?)
    }
}

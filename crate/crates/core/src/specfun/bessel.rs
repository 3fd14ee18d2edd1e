//! Modified Bessel functions of real order and positive real argument.
//!
//! `I` is summed from its ascending series up to `asym_switch` and from the
//! Hankel expansion beyond. `K` uses Temme's series for z < 2 and Steed's
//! continued fraction otherwise, followed by upward recurrence; both are
//! uniform in the order, so integer orders need no special treatment.
//! [`bessel_k_reflection`] keeps the textbook `(I_{-nu} - I_nu)/sin` route as
//! an independent cross-check.

use super::gamma::{rgamma, sin_pi, temme_gammas};
use super::{CompensatedSum, Result, SpecFunConfig, SpecFunError};
use std::f64::consts::PI;

const TEMME_SWITCH: f64 = 2.0;
const CF_EPS: f64 = 1e-16;
const CF_MAX_ITER: usize = 10_000;

pub fn bessel_i(nu: f64, z: f64) -> Result<f64> {
    bessel_i_with(&SpecFunConfig::DEFAULT, nu, z)
}

pub fn bessel_i_with(cfg: &SpecFunConfig, nu: f64, z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(SpecFunError::Domain(z, "non-negative"));
    }
    let nu = if nu < 0.0 && nu == nu.floor() { -nu } else { nu };
    if z == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    if z > cfg.asym_switch {
        i_hankel(cfg, nu, z)
    } else {
        i_series(cfg, nu, z)
    }
}

fn i_series(cfg: &SpecFunConfig, nu: f64, z: f64) -> Result<f64> {
    let q = 0.25 * z * z;
    let mut term = (0.5 * z).powf(nu) * rgamma(nu + 1.0);
    let mut sum = CompensatedSum::default();
    sum.add(term);
    for k in 1..cfg.max_terms {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum.add(term);
        if term.abs() <= cfg.series_tol * sum.value().abs() * 1e-2 || term == 0.0 {
            return Ok(sum.value());
        }
    }
    Err(SpecFunError::NoConvergence { what: "Bessel I series", terms: cfg.max_terms })
}

/// `e^{-z} I_nu(z)`, finite for arguments where `I_nu` itself overflows.
pub fn bessel_i_scaled(nu: f64, z: f64) -> Result<f64> {
    let cfg = &SpecFunConfig::DEFAULT;
    if z > cfg.asym_switch {
        let nu = if nu < 0.0 && nu == nu.floor() { -nu } else { nu };
        hankel_sum(cfg, nu, z).map(|s| s / (2.0 * PI * z).sqrt())
    } else {
        Ok(bessel_i_with(cfg, nu, z)? * (-z).exp())
    }
}

fn i_hankel(cfg: &SpecFunConfig, nu: f64, z: f64) -> Result<f64> {
    Ok((z - 0.5 * (2.0 * PI * z).ln()).exp() * hankel_sum(cfg, nu, z)?)
}

fn hankel_sum(cfg: &SpecFunConfig, nu: f64, z: f64) -> Result<f64> {
    let mu4 = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = CompensatedSum::default();
    sum.add(term);
    let mut prev = f64::INFINITY;
    for k in 1..cfg.max_terms {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu4 - odd * odd) / (8.0 * k as f64 * z);
        if next.abs() >= prev.abs() {
            break;
        }
        sum.add(next);
        prev = next;
        term = next;
        if term.abs() <= 1e-2 * cfg.series_tol * sum.value().abs() {
            break;
        }
    }
    Ok(sum.value())
}

pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    Ok(bessel_k_pair(nu.abs(), z)?.0)
}

/// `bessel_k` with an explicit config, for symmetry with the other entry
/// points; the Temme/Steed route has no tunable parameters.
pub fn bessel_k_with(_cfg: &SpecFunConfig, nu: f64, z: f64) -> Result<f64> {
    bessel_k(nu, z)
}

/// `(K_nu(z), K_{nu+1}(z))` for `nu >= -1/2`.
pub fn bessel_k_pair(nu: f64, z: f64) -> Result<(f64, f64)> {
    let (a, b) = bessel_k_pair_scaled(nu, z)?;
    let w = (-z).exp();
    Ok((a * w, b * w))
}

/// `e^z (K_nu(z), K_{nu+1}(z))` for `nu >= -1/2`.
pub fn bessel_k_pair_scaled(nu: f64, z: f64) -> Result<(f64, f64)> {
    if !(z > 0.0) {
        return Err(SpecFunError::Domain(z, "positive"));
    }
    if !(nu >= -0.5) {
        return Err(SpecFunError::Invalid(format!("bessel_k_pair needs nu >= -1/2, got {nu}")));
    }
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let (mut k_mu, mut k_mu1) = if z < TEMME_SWITCH {
        let (a, b) = temme_series(mu, z)?;
        (a * z.exp(), b * z.exp())
    } else {
        steed_cf2_scaled(mu, z)?
    };
    let xi2 = 2.0 / z;
    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * xi2 * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
    }
    Ok((k_mu, k_mu1))
}

fn temme_series(mu: f64, x: f64) -> Result<(f64, f64)> {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < 1e-15 { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < 1e-15 { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..CF_MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * CF_EPS {
            return Ok((sum, sum1 * 2.0 / x));
        }
    }
    Err(SpecFunError::NoConvergence { what: "Temme series for K", terms: CF_MAX_ITER })
}

fn steed_cf2_scaled(mu: f64, x: f64) -> Result<(f64, f64)> {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..CF_MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < CF_EPS {
            let h = a1 * h;
            let k_mu = (PI / (2.0 * x)).sqrt() / s;
            let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
            return Ok((k_mu, k_mu1));
        }
    }
    Err(SpecFunError::NoConvergence { what: "Steed continued fraction for K", terms: CF_MAX_ITER })
}

/// `K_nu = (pi/2)(I_{-nu} - I_nu)/sin(nu pi)`, averaging the orders
/// `n +- integer_nu_eps` inside the band around an integer `n`.
pub fn bessel_k_reflection(cfg: &SpecFunConfig, nu: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(SpecFunError::Domain(z, "positive"));
    }
    let nu = nu.abs();
    let n = nu.round();
    let raw = |v: f64| -> Result<f64> {
        let diff = bessel_i_with(cfg, -v, z)? - bessel_i_with(cfg, v, z)?;
        Ok(0.5 * PI * diff / sin_pi(v))
    };
    if (nu - n).abs() < cfg.integer_nu_eps {
        let eps = cfg.integer_nu_eps;
        Ok(0.5 * (raw(n - eps)? + raw(n + eps)?))
    } else {
        raw(nu)
    }
}

/// dI/dz via `I_{nu+1} + (nu/z) I_nu`.
pub fn bessel_i_prime(nu: f64, z: f64) -> Result<f64> {
    if z == 0.0 {
        return if nu == 0.0 || nu > 1.0 {
            Ok(0.0)
        } else if nu == 1.0 {
            Ok(0.5)
        } else {
            Err(SpecFunError::Domain(z, "positive when 0 < nu < 1 (derivative unbounded)"))
        };
    }
    Ok(bessel_i(nu + 1.0, z)? + nu / z * bessel_i(nu, z)?)
}

/// dK/dz via `-K_{nu+1} + (nu/z) K_nu`.
pub fn bessel_k_prime(nu: f64, z: f64) -> Result<f64> {
    Ok(-bessel_k(nu + 1.0, z)? + nu / z * bessel_k(nu, z)?)
}

//! Confluent hypergeometric function `Phi(a, c; z)` for real parameters and
//! complex argument.
//!
//! Inside `|z| <= asym_switch` the power series is summed in double-double
//! arithmetic: on the imaginary axis the partial terms reach `e^|z|` while the
//! sum stays O(1), which plain f64 cannot absorb. Beyond the switch, in the
//! open upper half-plane, `Phi` is rebuilt from the two Hankel-type
//! asymptotic series `H+` and `H-`.

use super::dd::{CDd, Dd};
use super::gamma::{gamma, rgamma};
use super::{Result, SpecFunConfig, SpecFunError};
use num_complex::Complex64;
use std::f64::consts::PI;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

pub fn kummer_phi(a: f64, c: f64, z: Complex64) -> Result<Complex64> {
    kummer_phi_with(&SpecFunConfig::DEFAULT, a, c, z)
}

pub fn kummer_phi_with(cfg: &SpecFunConfig, a: f64, c: f64, z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(c) {
        return Err(SpecFunError::KummerPole(c));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecFunError::Invalid(format!("non-finite Kummer argument {z}")));
    }
    if z.im < 0.0 {
        return Ok(kummer_phi_with(cfg, a, c, z.conj())?.conj());
    }
    if z.im == 0.0 && z.re < 0.0 {
        // Kummer's transformation turns an alternating series into a positive one
        return Ok(z.exp() * kummer_phi_with(cfg, c - a, c, -z)?);
    }
    let polynomial = is_nonpositive_integer(a);
    if z.norm() > cfg.asym_switch && z.im > 0.0 && !polynomial {
        return phi_asymptotic(a, c, z);
    }
    phi_series(cfg, a, c, z)
}

fn phi_series(cfg: &SpecFunConfig, a: f64, c: f64, z: Complex64) -> Result<Complex64> {
    let mut term = CDd::new(Complex64::new(1.0, 0.0));
    let mut sum = term;
    let zabs = z.norm();
    for k in 0..cfg.max_terms {
        let kf = k as f64;
        let num = Dd::new(a).add_f64(kf);
        let den = Dd::new(c).add_f64(kf).mul_f64(kf + 1.0);
        term = term.scale(num.div(den)).mul_c64(z);
        sum = sum.add(term);
        let t = term.abs_approx();
        if t == 0.0 {
            return Ok(sum.to_c64());
        }
        if kf + 1.0 > zabs && t <= cfg.series_tol * 1e-2 * sum.abs_approx() {
            return Ok(sum.to_c64());
        }
    }
    Err(SpecFunError::NoConvergence { what: "Kummer series", terms: cfg.max_terms })
}

/// Sums of `H+` and `H-` without their prefactors, truncated after `terms`
/// terms or earlier at the smallest term when `terms` is `None`.
fn h_sums(a: f64, c: f64, z: Complex64, terms: Option<usize>) -> (Complex64, Complex64) {
    let zinv = 1.0 / z;
    let cap = terms.unwrap_or_else(|| z.norm().floor() as usize);
    let mut plus = Complex64::new(1.0, 0.0);
    let mut minus = Complex64::new(1.0, 0.0);
    let mut tp = Complex64::new(1.0, 0.0);
    let mut tm = Complex64::new(1.0, 0.0);
    let (mut plus_live, mut minus_live) = (true, true);
    for k in 0..cap {
        let kf = k as f64;
        if plus_live {
            let next = tp * ((c - a + kf) * (1.0 - a + kf) / (kf + 1.0)) * zinv;
            if terms.is_none() && (next.norm() >= tp.norm() || next.norm() < 1e-18 * plus.norm()) {
                plus_live = false;
            } else {
                plus += next;
                tp = next;
            }
        }
        if minus_live {
            let next = -tm * ((a + kf) * (1.0 + a - c + kf) / (kf + 1.0)) * zinv;
            if terms.is_none() && (next.norm() >= tm.norm() || next.norm() < 1e-18 * minus.norm()) {
                minus_live = false;
            } else {
                minus += next;
                tm = next;
            }
        }
        if !plus_live && !minus_live {
            break;
        }
    }
    (plus, minus)
}

fn h_prefactors(a: f64, c: f64, z: Complex64) -> (Complex64, Complex64) {
    let ln_abs = z.norm().ln();
    let arg = z.arg();
    let plus = (Complex64::new(ln_abs, arg) * (a - c)).exp();
    let minus = (Complex64::new(ln_abs, arg - PI) * (-a)).exp();
    (plus, minus)
}

/// The pair `(H+, H-)` truncated after `terms` correction terms. `z` must lie
/// in the open upper half-plane and `terms <= floor(|z|)`.
pub fn h_asym(a: f64, c: f64, z: Complex64, terms: usize) -> Result<(Complex64, Complex64)> {
    if !(z.im > 0.0) {
        return Err(SpecFunError::Invalid(format!("h_asym needs 0 < arg z < pi, got z = {z}")));
    }
    if terms as f64 > z.norm().floor() {
        return Err(SpecFunError::Invalid(format!(
            "h_asym truncation {terms} exceeds floor(|z|) = {}",
            z.norm().floor()
        )));
    }
    let (sp, sm) = h_sums(a, c, z, Some(terms));
    let (pp, pm) = h_prefactors(a, c, z);
    Ok((pp * sp, pm * sm))
}

fn phi_asymptotic(a: f64, c: f64, z: Complex64) -> Result<Complex64> {
    let (sp, sm) = h_sums(a, c, z, None);
    let (pp, pm) = h_prefactors(a, c, z);
    let gc = gamma(c)?;
    Ok(gc * (rgamma(a) * z.exp() * pp * sp + rgamma(c - a) * pm * sm))
}

/// n-th derivative in z via `(a)_n/(c)_n Phi(a+n, c+n; z)`.
pub fn kummer_phi_deriv(a: f64, c: f64, z: Complex64, n: u32) -> Result<Complex64> {
    if is_nonpositive_integer(c) {
        return Err(SpecFunError::KummerPole(c));
    }
    let mut ratio = 1.0;
    for j in 0..n {
        ratio *= (a + j as f64) / (c + j as f64);
    }
    if ratio == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(ratio * kummer_phi(a + n as f64, c + n as f64, z)?)
}

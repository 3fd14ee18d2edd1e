//! Table of identity checks backing `specfun-selftest`.

use super::{
    bessel_i, bessel_k, bessel_k_reflection, gamma, h_asym, kummer_phi, kummer_phi_deriv, kummer_phi_with, Result,
    SpecFunConfig,
};
use num_complex::Complex64;
use serde::Serialize;

pub const IDENTITY_TOL: f64 = 1e-10;
pub const CROSSOVER_TOL: f64 = 1e-7;

#[derive(Clone, Debug, Serialize)]
pub struct IdentityRow {
    pub identity: &'static str,
    pub nu_or_a: f64,
    /// Real argument, or the imaginary part for identities on the imaginary axis.
    pub z: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    pub pass: bool,
}

fn row(identity: &'static str, nu: f64, z: f64, lhs: f64, rhs: f64, tol: f64) -> IdentityRow {
    let rel_err = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
    IdentityRow { identity, nu_or_a: nu, z, lhs, rhs, rel_err, pass: rel_err <= tol }
}

fn crow(identity: &'static str, a: f64, y: f64, lhs: Complex64, rhs: Complex64, tol: f64) -> IdentityRow {
    let rel_err = (lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
    IdentityRow { identity, nu_or_a: a, z: y, lhs: lhs.norm(), rhs: rhs.norm(), rel_err, pass: rel_err <= tol }
}

pub const WRONSKIAN_ORDERS: [f64; 5] = [0.0, 0.25, 1.0 / 3.0, 0.5, 0.9];

/// 40 log-spaced points on [0.01, 50].
pub fn wronskian_arguments() -> Vec<f64> {
    (0..40).map(|i| 0.01 * (5000.0_f64).powf(i as f64 / 39.0)).collect()
}

pub fn run_selftest(cfg: &SpecFunConfig) -> Result<Vec<IdentityRow>> {
    let mut rows = Vec::new();
    let zs = wronskian_arguments();

    for &nu in &WRONSKIAN_ORDERS {
        for &z in &zs {
            let lhs = bessel_i(nu, z)? * bessel_k(nu + 1.0, z)? + bessel_i(nu + 1.0, z)? * bessel_k(nu, z)?;
            rows.push(row("bessel_wronskian", nu, z, z * lhs, 1.0, IDENTITY_TOL));
        }
    }

    for &nu in &[0.25, 0.5, 1.3, 2.0] {
        for &z in &[0.1, 1.0, 7.5, 25.0, 40.0] {
            let i_lhs = bessel_i(nu - 1.0, z)? - bessel_i(nu + 1.0, z)?;
            rows.push(row("bessel_i_recurrence", nu, z, i_lhs, 2.0 * nu / z * bessel_i(nu, z)?, IDENTITY_TOL));
            let k_lhs = bessel_k(nu + 1.0, z)? - bessel_k(nu - 1.0, z)?;
            rows.push(row("bessel_k_recurrence", nu, z, k_lhs, 2.0 * nu / z * bessel_k(nu, z)?, IDENTITY_TOL));
            // both derivative forms of I must agree
            let d_up = bessel_i(nu + 1.0, z)? + nu / z * bessel_i(nu, z)?;
            let d_down = bessel_i(nu - 1.0, z)? - nu / z * bessel_i(nu, z)?;
            rows.push(row("bessel_i_derivative_forms", nu, z, d_up, d_down, IDENTITY_TOL));
        }
    }

    for &nu in &[0.25, 1.0 / 3.0, 0.75, 1.4] {
        for &z in &[0.05, 0.5, 1.5] {
            rows.push(row(
                "bessel_k_reflection_route",
                nu,
                z,
                bessel_k_reflection(cfg, nu, z)?,
                bessel_k(nu, z)?,
                IDENTITY_TOL,
            ));
        }
    }

    for &x in &[-3.7, -0.3, 0.2, 2.5, 11.25] {
        rows.push(row("gamma_shift", x, x, gamma(x + 1.0)?, x * gamma(x)?, IDENTITY_TOL));
    }

    let pairs = [(0.25, 0.5), (1.25, 1.5), (0.75, 1.5), (0.75, 0.5), (1.0 / 3.0, 2.0 / 3.0)];
    for &(a, c) in &pairs {
        for &y in &[0.7, 3.1, 12.0, 28.0, 45.0] {
            let z = Complex64::new(0.0, y);
            let d1 = kummer_phi_deriv(a, c, z, 1)?;
            let d_contig = (1.0 - c) / z * (kummer_phi(a, c, z)? - kummer_phi(a, c - 1.0, z)?);
            rows.push(crow("kummer_derivative_contiguous", a, y, d_contig, d1, IDENTITY_TOL));
            let direct = kummer_phi(a, c, z)?;
            let transformed = z.exp() * kummer_phi(c - a, c, -z)?;
            rows.push(crow("kummer_transformation", a, y, transformed, direct, IDENTITY_TOL));
        }
    }

    // series and asymptotic branches on either side of the switch
    let switch = cfg.asym_switch;
    let series_cfg = SpecFunConfig { asym_switch: f64::INFINITY, max_terms: 2000, ..*cfg };
    for &(a, c) in &pairs {
        let z = Complex64::new(0.0, switch * (1.0 + 1e-9));
        let asym = kummer_phi_with(cfg, a, c, z)?;
        let series = kummer_phi_with(&series_cfg, a, c, z)?;
        rows.push(crow("kummer_crossover", a, z.im, asym, series, CROSSOVER_TOL));
        let terms = (z.norm().floor() as usize).min(8);
        let (hp, _) = h_asym(a, c, z, terms)?;
        let zc = (Complex64::new(z.norm().ln(), z.arg()) * (c - a)).exp();
        rows.push(crow("h_plus_leading_order", a, z.im, hp * zc, Complex64::new(1.0, 0.0), 0.1));
    }

    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_identity_passes() {
        let rows = run_selftest(&SpecFunConfig::DEFAULT).unwrap();
        let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }
}

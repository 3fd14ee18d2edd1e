//! Dormand–Prince 5(4) integrator with PI step-size control, used as the
//! independent reference for the closed-form solutions elsewhere in the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("ode: step size collapsed to {h:e} at t = {t}")]
    StepUnderflow { t: f64, h: f64 },
    #[error("ode: exceeded {0} steps")]
    TooManySteps(usize),
    #[error("ode: tolerance {0} must lie in (0, 1e-2]")]
    BadTolerance(f64),
    #[error("ode: non-finite state at t = {0}")]
    NonFinite(f64),
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
pub const MAX_STEPS: usize = 2_000_000;
/// Fraction of the initial sup-norm below which errors are measured absolutely.
const FLOOR: f64 = 1e-3;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..N {
            out[i] += h * coef * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// The local error of each accepted step is held below `tol` times
/// `max(|y_i|, |y_new_i|, 1e-3 s0)`, where `s0` is the sup-norm of the initial
/// state. Because every scale is proportional to the data, doubling `y0`
/// reproduces the same step sequence and exactly doubles the result.
pub fn integrate<const N: usize, F>(mut f: F, t0: f64, y0: [f64; N], t1: f64, tol: f64) -> Result<[f64; N], OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(OdeError::BadTolerance(tol));
    }
    let s0 = y0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if s0 == 0.0 || t0 == t1 {
        return Ok(y0);
    }
    let span = t1 - t0;
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * (span.abs() * 1e-3).min(tol.powf(0.2) * 0.1 * span.abs());
    let mut err_prev = 1e-4_f64;
    let mut k1 = f(t, &y);
    for _ in 0..MAX_STEPS {
        if (t1 - t) * dir <= 0.0 {
            return Ok(y);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &y_new);
        let mut err = 0.0_f64;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = tol * y[i].abs().max(y_new[i].abs()).max(FLOOR * s0);
            err = err.max((e / scale).abs());
        }
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            if err.is_nan() || y_new.iter().any(|v| v.is_nan()) {
                return Err(OdeError::NonFinite(t));
            }
            h *= MIN_FACTOR;
            continue;
        }
        if err <= 1.0 {
            let fac = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            t = if (t + h - t1) * dir >= 0.0 { t1 } else { t + h };
            y = y_new;
            k1 = k7;
            err_prev = err.max(1e-4);
            h *= fac;
        } else {
            h *= (SAFETY * err.powf(-ALPHA)).clamp(MIN_FACTOR, 1.0);
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(OdeError::StepUnderflow { t, h });
        }
    }
    Err(OdeError::TooManySteps(MAX_STEPS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_over_many_periods() {
        let y = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 50.0, 1e-12).unwrap();
        assert!((y[0] - 50f64.cos()).abs() < 1e-9);
        assert!((y[1] + 50f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn backward_integration() {
        let y = integrate(|_, y: &[f64; 1]| [y[0]], 1.0, [1f64.exp()], 0.0, 1e-12).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn zero_data_stays_zero() {
        let y = integrate(|_, y: &[f64; 2]| [y[1], y[0]], 0.0, [0.0, 0.0], 3.0, 1e-10).unwrap();
        assert_eq!(y, [0.0, 0.0]);
    }
}

//! The averaged functional `Y(M) = ∫_1^M (∫∫ w θ_σ^{2p'}) dσ/σ`, its
//! derivative and the differential inequality it satisfies along a run.

use super::{phi_harmonic, phi_harmonic_scaled, BlowupError, Cutoffs, Result};
use crate::aux_ode::{mu_of, origin_constant, phase, AuxOde};
use crate::solver::{abs_pow, sample_data, SpectralGrid, Trace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Uniformly sampled `t ↦ ∫ w(t, x) dx`, linearly interpolated between
/// samples.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    start: f64,
    spacing: f64,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(start: f64, spacing: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(BlowupError::BadSeries(format!("need at least 2 samples, have {}", values.len())));
        }
        if !(spacing > 0.0 && start.is_finite() && spacing.is_finite()) {
            return Err(BlowupError::BadSeries(format!(
                "start {start} and spacing {spacing} must be finite, spacing > 0"
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(BlowupError::BadSeries(format!("sample {k} is not finite")));
        }
        Ok(TimeSeries { start, spacing, values })
    }

    /// Samples `f` at `start + k * spacing` for `k < count`.
    pub fn sample(start: f64, spacing: f64, count: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(start, spacing, (0..count).map(|k| f(start + k as f64 * spacing)).collect())
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        self.start + (self.values.len() - 1) as f64 * self.spacing
    }

    /// Every other sample, for error estimates.
    pub fn coarsened(&self) -> Result<Self> {
        Self::new(self.start, 2.0 * self.spacing, self.values.iter().step_by(2).copied().collect())
    }

    pub fn at(&self, t: f64) -> f64 {
        let x = ((t - self.start) / self.spacing).max(0.0);
        let last = self.values.len() - 1;
        let k = (x.floor() as usize).min(last - 1);
        let frac = (x - k as f64).min(1.0);
        self.values[k] * (1.0 - frac) + self.values[k + 1] * frac
    }

    /// `∫_lo^hi W(t) weight(t) dt`, split at the samples so each piece is a
    /// linear function times a smooth weight.
    fn weighted_integral(&self, lo: f64, hi: f64, weight: impl Fn(f64) -> f64) -> f64 {
        let rule = gauss_legendre();
        let first = ((lo - self.start) / self.spacing).floor().max(0.0) as usize;
        let mut total = 0.0;
        let mut k = first;
        let mut a = lo;
        while a < hi {
            let b = (self.start + (k + 1) as f64 * self.spacing).min(hi);
            if b > a {
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                total +=
                    half * rule.iter().map(|(x, w)| w * self.at(mid + half * x) * weight(mid + half * x)).sum::<f64>();
                a = b;
            }
            k += 1;
        }
        total
    }
}

fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = 6;
        (0..n)
            .map(|i| {
                let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 1.0;
                for _ in 0..50 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let k = k as f64;
                        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let step = p1 / dp;
                    x -= step;
                    if step.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

/// Number of log-spaced σ nodes in the outer trapezoid of `Y`.
const SIGMA_NODES: usize = 257;

fn check_scale(series: &TimeSeries, scale: f64) -> Result<()> {
    let hi = series.horizon();
    if !(scale > 1.0 && scale <= hi * (1.0 + 1e-12)) || series.start() > 0.5 {
        return Err(BlowupError::ScaleOutOfRange { scale, lo: 1.0, hi });
    }
    Ok(())
}

/// `∫∫ w θ_σ^{2p'}`: the inner integral of `Y` at scale `σ`.
fn slice(series: &TimeSeries, cut: &Cutoffs) -> f64 {
    let s = cut.scale();
    series.weighted_integral(0.5 * s, s, |t| cut.weight(t))
}

pub fn functional_y(series: &TimeSeries, p: f64, scale: f64) -> Result<f64> {
    check_scale(series, scale)?;
    Cutoffs::new(scale, p)?;
    let top = scale.ln();
    let h = top / (SIGMA_NODES - 1) as f64;
    let mut total = 0.0;
    for k in 0..SIGMA_NODES {
        let sigma = (k as f64 * h).exp();
        // σ = 1 is not a valid cutoff scale but θ_1 is still well defined
        let cut = Cutoffs::new(sigma.max(1.0 + 1e-15), p)?;
        let w = if k == 0 || k == SIGMA_NODES - 1 { 0.5 } else { 1.0 };
        total += w * slice(series, &cut);
    }
    Ok(total * h)
}

/// `Y'(M) = M^{-1} ∫∫ w θ_M^{2p'}`.
pub fn functional_y_prime(series: &TimeSeries, p: f64, scale: f64) -> Result<f64> {
    check_scale(series, scale)?;
    Ok(slice(series, &Cutoffs::new(scale, p)?) / scale)
}

/// `∫∫ w η_M^{2p'}`, which bounds `Y(M) / ln 2`.
pub fn cutoff_integral(series: &TimeSeries, p: f64, scale: f64) -> Result<f64> {
    check_scale(series, scale)?;
    let cut = Cutoffs::new(scale, p)?;
    Ok(series.weighted_integral(series.start(), scale, |t| cut.weight(t)))
}

/// Both sides of the integrated identity behind the key inequality. With
/// `E = η_M^{2p'}`:
/// `lhs = eps C1 + ∫∫ |u_t|^p t^{-2m} E |λ'| φ`,
/// `dropped = ∫∫ |u_t|^p t^{-2m} |E'| λ φ >= 0`,
/// and `lhs + dropped = I + II + III` for an exact solution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntermediateSides {
    pub lhs: f64,
    pub dropped: f64,
    pub term_i: f64,
    pub term_ii: f64,
    pub term_iii: f64,
    pub rhs: f64,
    pub identity_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyInequalityRow {
    pub scale: f64,
    pub y: f64,
    pub y_prime: f64,
    /// `∫∫ w η_M^{2p'}`; `y <= ln 2 * cutoff_integral`.
    pub cutoff_integral: f64,
    /// `M^κ Y'(M)`.
    pub lhs: f64,
    /// `(C1 eps + Y / ln 2)^p`.
    pub rhs: f64,
    /// `lhs / rhs`, 1 when both vanish.
    pub margin: f64,
    pub holds: bool,
    /// Richardson estimate from the trace at half its snapshot rate.
    pub quad_err: f64,
    /// `lhs - rhs` exceeds `quad_err`.
    pub resolved: bool,
    pub intermediate: IntermediateSides,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyInequalityReport {
    pub m: f64,
    pub p: f64,
    pub dim: usize,
    pub epsilon: f64,
    pub c1: f64,
    /// `κ = [(m+1)(n-1) - m](p-1)/2`.
    pub exponent: f64,
    pub rows: Vec<KeyInequalityRow>,
    pub fraction_holding: f64,
    pub fraction_resolved: f64,
    /// Smallest `K` with `K * lhs >= rhs` on every row.
    pub implied_constant: Option<f64>,
    pub all_equal: bool,
}

/// Per-snapshot spatial integrals over the light cone, scaled by
/// `e^{-phase(t)}`: `(∫ |v|^p φ, ∫ v φ)`.
struct ConeIntegrals {
    times: Vec<f64>,
    power: Vec<f64>,
    linear: Vec<f64>,
}

fn cone_integrals(trace: &Trace, grid: &SpectralGrid) -> Result<ConeIntegrals> {
    let snaps = &trace.snapshots;
    if snaps.len() < 5 {
        return Err(BlowupError::BadSeries(format!("need at least 5 snapshots, have {}", snaps.len())));
    }
    let h = snaps[1].t - snaps[0].t;
    if snaps[0].t != 0.0 || !(h > 0.0) {
        return Err(BlowupError::BadSeries("snapshots must start at t = 0 with positive spacing".into()));
    }
    for (k, s) in snaps.iter().enumerate() {
        if (s.t - k as f64 * h).abs() > 1e-9 * h.max(s.t) {
            return Err(BlowupError::BadSeries(format!("snapshot {k} at t = {} breaks uniform spacing {h}", s.t)));
        }
        if s.v.len() != grid.len() {
            return Err(BlowupError::BadSeries(format!("snapshot {k} does not match the grid")));
        }
    }
    let (m, p, dim) = (trace.config.m, trace.config.p, grid.dim());
    let radii = grid.radii();
    let weight: Vec<f64> = radii.iter().map(|&r| phi_harmonic_scaled(dim, r)).collect::<Result<_>>()?;
    let slack = 2.0 * grid.spacing();
    let pairs: Vec<(f64, f64)> = snaps
        .par_iter()
        .map(|s| {
            let (ph, reach) = (phase(m, s.t), 1.0 + phase(m, s.t) + slack);
            let (mut a, mut b) = (0.0, 0.0);
            for ((v, r), w) in s.v.iter().zip(&radii).zip(&weight) {
                if *r <= reach {
                    let f = w * (r - ph).exp();
                    a += abs_pow(*v, p) * f;
                    b += v * f;
                }
            }
            (a * grid.cell_volume(), b * grid.cell_volume())
        })
        .collect();
    let (power, linear) = pairs.into_iter().unzip();
    Ok(ConeIntegrals { times: snaps.iter().map(|s| s.t).collect(), power, linear })
}

struct Sides {
    lhs: f64,
    rhs: f64,
    y: f64,
    y_prime: f64,
    chain: f64,
    mid: IntermediateSides,
}

#[allow(clippy::too_many_arguments)]
fn sides_at(
    cone: &ConeIntegrals,
    stride: usize,
    aux: &AuxOde,
    p: f64,
    scale: f64,
    kappa: f64,
    c1_eps: f64,
) -> Result<Sides> {
    let m = aux.m();
    let cut = Cutoffs::new(scale, p)?;
    let idx: Vec<usize> = (0..cone.times.len()).step_by(stride).collect();
    let h = cone.times[stride] - cone.times[0];
    let mut w_vals = Vec::with_capacity(idx.len());
    let mut mid = IntermediateSides::default();
    for (j, &k) in idx.iter().enumerate() {
        let t = cone.times[k];
        let (lam, _) = aux.decaying_scaled(t)?;
        let slope_w = aux.deriv_over_weight_scaled(t)?;
        w_vals.push(slope_w.abs() * cone.power[k]);
        if t > scale {
            continue;
        }
        let q = if j == 0 || j == idx.len() - 1 { 0.5 * h } else { h };
        let (e, e1, e2) = (cut.weight(t), cut.weight_dt(t), cut.weight_dtt(t));
        mid.lhs += q * e * slope_w.abs() * cone.power[k];
        if e1 != 0.0 || e2 != 0.0 {
            let tw = t.powf(-2.0 * m);
            mid.dropped += q * tw * e1.abs() * lam * cone.power[k];
            mid.term_i += -q * 2.0 * m * tw / t * e1 * lam * cone.linear[k];
            mid.term_ii += q * tw * e2 * lam * cone.linear[k];
            mid.term_iii += q * 2.0 * e1 * slope_w * cone.linear[k];
        }
    }
    mid.lhs += c1_eps;
    mid.rhs = mid.term_i + mid.term_ii + mid.term_iii;
    mid.identity_residual = mid.lhs + mid.dropped - mid.rhs;
    let series = TimeSeries::new(0.0, h, w_vals)?;
    let y = functional_y(&series, p, scale)?;
    let y_prime = functional_y_prime(&series, p, scale)?;
    let chain = cutoff_integral(&series, p, scale)?;
    let lhs = scale.powf(kappa) * y_prime;
    let rhs = (c1_eps + y / std::f64::consts::LN_2).powf(p);
    Ok(Sides { lhs, rhs, y, y_prime, chain, mid })
}

/// `C1 = c0(μ) ∫ f φ + c0(-μ) ∫ g φ` for the data profile of `trace`.
pub fn data_constant(trace: &Trace) -> Result<f64> {
    let grid = SpectralGrid::new(trace.grid)?;
    let m = trace.config.m;
    let data = sample_data(&grid, trace.profile, 1.0, m)?;
    let mu = mu_of(m);
    let phi: Vec<f64> = grid.radii().iter().map(|&r| phi_harmonic(grid.dim(), r)).collect::<Result<_>>()?;
    let weighted = |field: &[f64]| grid.integrate(&field.iter().zip(&phi).map(|(a, b)| a * b).collect::<Vec<_>>());
    Ok(origin_constant(m, mu)? * weighted(&data.f) + origin_constant(m, -mu)? * weighted(&data.g))
}

/// Evaluates the key differential inequality
/// `M^κ Y'(M) >= (C1 eps + Y(M)/ln 2)^p` with `w = |u_t|^p t^{-2m} |λ'| φ`
/// along a stored run, together with the integrated identity it comes from.
/// Diagnostic only: rows where it fails are reported, not rejected.
pub fn check_key_inequality(trace: &Trace, scales: &[f64]) -> Result<KeyInequalityReport> {
    let grid = SpectralGrid::new(trace.grid)?;
    let (m, p, dim, eps) = (trace.config.m, trace.config.p, grid.dim(), trace.epsilon);
    if !(1..=3).contains(&dim) {
        return Err(BlowupError::UnsupportedDim(dim));
    }
    let cone = cone_integrals(trace, &grid)?;
    let aux = AuxOde::new(m)?;
    let c1 = data_constant(trace)?;
    let kappa = (((m + 1.0) * (dim as f64 - 1.0)) - m) * (p - 1.0) / 2.0;
    let coarse_top = cone.times[(cone.times.len() - 1) / 2 * 2];
    let rows: Vec<KeyInequalityRow> = scales
        .par_iter()
        .map(|&scale| {
            if !(scale > 1.0 && scale <= coarse_top) {
                return Err(BlowupError::ScaleOutOfRange { scale, lo: 1.0, hi: coarse_top });
            }
            let fine = sides_at(&cone, 1, &aux, p, scale, kappa, c1 * eps)?;
            let coarse = sides_at(&cone, 2, &aux, p, scale, kappa, c1 * eps)?;
            let quad_err = ((fine.lhs - coarse.lhs).abs()).max((fine.rhs - coarse.rhs).abs()) / 3.0;
            let side = fine.lhs.min(fine.rhs);
            if side > 0.0 && quad_err > 0.1 * side {
                return Err(BlowupError::CoarseTrace { scale, error: quad_err, side });
            }
            let both_zero = fine.lhs == 0.0 && fine.rhs == 0.0;
            let margin = if both_zero { 1.0 } else { fine.lhs / fine.rhs };
            Ok(KeyInequalityRow {
                scale,
                y: fine.y,
                y_prime: fine.y_prime,
                cutoff_integral: fine.chain,
                lhs: fine.lhs,
                rhs: fine.rhs,
                margin,
                holds: fine.lhs >= fine.rhs,
                quad_err,
                resolved: fine.lhs - fine.rhs > quad_err,
                intermediate: fine.mid,
            })
        })
        .collect::<Result<_>>()?;
    let count = rows.len().max(1) as f64;
    let fraction_holding = rows.iter().filter(|r| r.holds).count() as f64 / count;
    let fraction_resolved = rows.iter().filter(|r| r.holds && r.resolved).count() as f64 / count;
    let implied_constant = rows
        .iter()
        .filter(|r| r.lhs > 0.0)
        .map(|r| r.rhs / r.lhs)
        .fold(None, |acc: Option<f64>, k| Some(acc.map_or(k, |a| a.max(k))));
    let all_equal = rows.iter().all(|r| r.lhs == r.rhs);
    Ok(KeyInequalityReport {
        m,
        p,
        dim,
        epsilon: eps,
        c1,
        exponent: kappa,
        rows,
        fraction_holding,
        fraction_resolved,
        implied_constant,
        all_equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_rule_is_exact_for_degree_eleven() {
        let s: f64 = gauss_legendre().iter().map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = gauss_legendre().iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn interpolation_is_exact_for_lines() {
        let s = TimeSeries::sample(0.0, 0.1, 31, |t| 2.0 * t + 1.0).unwrap();
        for t in [0.0, 0.05, 1.234, 3.0] {
            assert!((s.at(t) - (2.0 * t + 1.0)).abs() < 1e-13);
        }
    }
}

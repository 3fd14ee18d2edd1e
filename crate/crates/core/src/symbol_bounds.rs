//! Pointwise checks of the homogeneous multiplier estimates.
//!
//! Each kind pairs a symbol with a weight in frequency and a claimed power
//! of time; the check reports the largest observed ratio on a finite grid.

use crate::aux_ode::phase;
use crate::cutoff::smooth_step;
use crate::propagator::{kernel_from, ModeSymbols, Propagator, PropagatorError, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymbolKind {
    V1,
    V2,
    DtV1,
    DtV2,
    W1,
    W2,
    DtW1,
    DtW2,
}

impl SymbolKind {
    pub const ALL: [SymbolKind; 8] = [
        SymbolKind::V1,
        SymbolKind::V2,
        SymbolKind::DtV1,
        SymbolKind::DtV2,
        SymbolKind::W1,
        SymbolKind::W2,
        SymbolKind::DtW1,
        SymbolKind::DtW2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SymbolKind::V1 => "V1",
            SymbolKind::V2 => "V2",
            SymbolKind::DtV1 => "dtV1",
            SymbolKind::DtV2 => "dtV2",
            SymbolKind::W1 => "W1",
            SymbolKind::W2 => "W2",
            SymbolKind::DtW1 => "dtW1",
            SymbolKind::DtW2 => "dtW2",
        }
    }

    /// Closed interval of admissible derivative weights; `dtV2` is unbounded above.
    pub fn sigma_range(self, mu: f64) -> (f64, f64) {
        match self {
            SymbolKind::V1 => (-mu, 0.0),
            SymbolKind::V2 => (-1.0 + mu, 0.0),
            SymbolKind::DtV1 => (1.0 - mu, 1.0),
            SymbolKind::DtV2 => (mu, f64::INFINITY),
            SymbolKind::W1 => (-1.0, -mu),
            SymbolKind::W2 => (-1.0, -1.0 + mu),
            SymbolKind::DtW1 => (0.0, 1.0 - mu),
            SymbolKind::DtW2 => (0.0, 0.0),
        }
    }

    pub fn is_kernel(self) -> bool {
        matches!(self, SymbolKind::W1 | SymbolKind::W2 | SymbolKind::DtW1 | SymbolKind::DtW2)
    }

    /// Endpoints of the admissible range, the natural sigmas to report.
    pub fn endpoint_sigmas(self, mu: f64) -> Vec<f64> {
        let (lo, hi) = self.sigma_range(mu);
        if hi.is_infinite() {
            vec![lo, lo + 1.0]
        } else if (hi - lo).abs() < 1e-15 {
            vec![lo]
        } else {
            vec![lo, hi]
        }
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SymbolKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SymbolKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown symbol kind '{s}'"))
    }
}

/// Frequency windows splitting a kernel into low, middle and high parts
/// relative to `x = phase(s) r` and `tau = t / s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyWindow {
    Low,
    Middle,
    High,
}

/// 1 on `[0, 1]`, 0 on `[2, inf)`.
pub fn low_cutoff(x: f64) -> f64 {
    smooth_step(x - 1.0)
}

impl FrequencyWindow {
    /// Window weight; the three weights sum to one for every `tau >= 1`.
    pub fn weight(self, m: f64, x: f64, tau: f64) -> f64 {
        let inner = low_cutoff(tau.powf(m + 1.0) * x);
        match self {
            FrequencyWindow::Low => inner,
            FrequencyWindow::Middle => low_cutoff(x) - inner,
            FrequencyWindow::High => 1.0 - low_cutoff(x),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundGrid {
    pub t: Vec<f64>,
    /// Earlier times for the kernel kinds; only pairs with `s <= t` are used.
    pub s: Vec<f64>,
    pub r: Vec<f64>,
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

impl BoundGrid {
    pub fn log_spaced(t: (f64, f64), r: (f64, f64), n_t: usize, n_r: usize) -> Self {
        let times = log_space(t.0, t.1, n_t);
        BoundGrid { s: times.clone(), t: times, r: log_space(r.0, r.1, n_r) }
    }

    /// Same ranges with twice the resolution.
    pub fn refined(&self) -> Self {
        let refine = |v: &[f64]| {
            if v.len() < 2 {
                return v.to_vec();
            }
            log_space(v[0], v[v.len() - 1], 2 * v.len() - 1)
        };
        BoundGrid { t: refine(&self.t), s: refine(&self.s), r: refine(&self.r) }
    }

    fn validate(&self, kernel: bool) -> Result<()> {
        let ok = |v: &[f64]| !v.is_empty() && v.iter().all(|x| x.is_finite() && *x > 0.0);
        if !ok(&self.t) {
            return Err(PropagatorError::BadGrid("t"));
        }
        if !ok(&self.r) {
            return Err(PropagatorError::BadGrid("r"));
        }
        if kernel && !ok(&self.s) {
            return Err(PropagatorError::BadGrid("s"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: SymbolKind,
    pub sigma: f64,
    pub constant: f64,
    /// `(t, s, r)` of the largest ratio; `s` equals `t` for single-time kinds.
    pub worst: (f64, f64, f64),
    pub samples: usize,
}

fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Largest `|weight(r) symbol| / claim(t, s)` over the grid.
pub fn symbol_bound_check(
    prop: &Propagator,
    kind: SymbolKind,
    sigma: f64,
    grid: &BoundGrid,
    window: Option<FrequencyWindow>,
) -> Result<BoundReport> {
    let m = prop.m();
    let (lo, hi) = kind.sigma_range(crate::aux_ode::mu_of(m));
    let slack = 1e-12;
    if !(sigma.is_finite() && sigma >= lo - slack && sigma <= hi + slack) {
        return Err(PropagatorError::InadmissibleSigma { kind: kind.name(), sigma, lo, hi });
    }
    grid.validate(kind.is_kernel())?;

    let mut times: Vec<f64> = grid.t.clone();
    if kind.is_kernel() {
        times.extend_from_slice(&grid.s);
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    let index = |x: f64| times.binary_search_by(|v| v.total_cmp(&x)).expect("time in table");
    let table: Vec<Vec<ModeSymbols>> = times
        .par_iter()
        .map(|&t| grid.r.iter().map(|&r| prop.symbols(t, r)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;

    let mut pairs = Vec::new();
    for &t in &grid.t {
        if kind.is_kernel() {
            pairs.extend(grid.s.iter().filter(|&&s| s <= t).map(|&s| (t, s)));
        } else {
            pairs.push((t, t));
        }
    }

    let best = pairs
        .par_iter()
        .map(|&(t, s)| {
            let (it, is) = (index(t), index(s));
            let tau = t / s;
            let mut best = (0.0_f64, (t, s, grid.r[0]));
            for (j, &r) in grid.r.iter().enumerate() {
                let sym_t = &table[it][j];
                let value = match kind {
                    SymbolKind::V1 => sym_t.v1.norm(),
                    SymbolKind::V2 => sym_t.v2.norm(),
                    SymbolKind::DtV1 => sym_t.dv1.norm(),
                    SymbolKind::DtV2 => sym_t.dv2.norm(),
                    _ => {
                        let k = kernel_from(sym_t, &table[is][j]);
                        match kind {
                            SymbolKind::W1 => k.w1.norm(),
                            SymbolKind::W2 => k.w2.norm(),
                            SymbolKind::DtW1 => k.dw1.norm(),
                            _ => k.dw2.norm(),
                        }
                    }
                };
                let weight = match kind {
                    SymbolKind::DtV1 | SymbolKind::DtV2 => bracket(r).powf(-sigma),
                    _ => r.powf(-sigma),
                };
                let claim = match kind {
                    SymbolKind::V1 => t.powf(sigma * (m + 1.0)),
                    SymbolKind::V2 => t.powf(sigma * (m + 1.0) + 1.0),
                    SymbolKind::DtV1 => t.powf(sigma * (m + 1.0) - 1.0),
                    SymbolKind::DtV2 => bracket(t).powf(sigma * (m + 1.0)),
                    SymbolKind::W1 | SymbolKind::W2 => tau.powf(-0.5 * m) * s.powf(1.0 + sigma * (m + 1.0)),
                    SymbolKind::DtW1 => tau.powf(0.5 * m) * s.powf(sigma * (m + 1.0)),
                    SymbolKind::DtW2 => tau.powf(0.5 * m),
                };
                let win = window.map_or(1.0, |w| w.weight(m, phase(m, s) * r, tau));
                let ratio = win * weight * value / claim;
                if ratio > best.0 {
                    best = (ratio, (t, s, r));
                }
            }
            best
        })
        .reduce(|| (0.0, (0.0, 0.0, 0.0)), |a, b| if b.0 > a.0 { b } else { a });

    Ok(BoundReport { kind, sigma, constant: best.0, worst: best.1, samples: pairs.len() * grid.r.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in SymbolKind::ALL {
            assert_eq!(k.name().parse::<SymbolKind>().unwrap(), k);
        }
        assert!("V3".parse::<SymbolKind>().is_err());
    }

    #[test]
    fn windows_partition_unity() {
        for &(x, tau) in &[(0.1, 1.0), (0.7, 3.0), (1.5, 1.2), (5.0, 10.0)] {
            let sum: f64 = [FrequencyWindow::Low, FrequencyWindow::Middle, FrequencyWindow::High]
                .iter()
                .map(|w| w.weight(1.0, x, tau))
                .sum();
            assert!((sum - 1.0).abs() < 1e-15);
            assert!(FrequencyWindow::Middle.weight(1.0, x, tau) >= 0.0);
        }
    }

    #[test]
    fn refinement_keeps_endpoints() {
        let g = BoundGrid::log_spaced((0.1, 10.0), (0.1, 100.0), 5, 7).refined();
        assert_eq!(g.t.len(), 9);
        assert_eq!(g.r.len(), 13);
        assert!((g.r[12] - 100.0).abs() < 1e-12);
    }
}

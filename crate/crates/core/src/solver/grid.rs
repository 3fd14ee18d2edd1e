//! Periodic grid on `[-L, L)^dim` with FFT-based spectral operators.

use super::{Result, SolverError};
use crate::propagator::{ModeSymbols, Propagator};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Below this many points transforms and pointwise loops stay serial.
const PARALLEL_MIN: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub half_width: f64,
}

impl GridSpec {
    /// Allowed points per axis for each dimension.
    pub fn size_range(dim: usize) -> Option<(usize, usize)> {
        match dim {
            1 => Some((64, 4096)),
            2 => Some((64, 512)),
            3 => Some((16, 128)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = Self::size_range(self.dim)
            .ok_or_else(|| SolverError::BadGrid(format!("dimension {} not in {{1, 2, 3}}", self.dim)))?;
        if !self.n.is_power_of_two() || self.n < lo || self.n > hi {
            return Err(SolverError::BadGrid(format!(
                "n = {} must be a power of two in [{lo}, {hi}] for dim {}",
                self.n, self.dim
            )));
        }
        if !(self.half_width.is_finite() && self.half_width > 2.0) {
            return Err(SolverError::BadGrid(format!("half-width L = {} must exceed 2", self.half_width)));
        }
        Ok(())
    }
}

pub struct SpectralGrid {
    spec: GridSpec,
    total: usize,
    dx: f64,
    k_unit: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k_sq: Vec<f64>,
    /// Index into `radial_keys` for every spectral index.
    radial_slot: Vec<u32>,
    /// Distinct values of the squared integer wave index, ascending.
    radial_keys: Vec<u64>,
    dealias: Vec<bool>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid").field("spec", &self.spec).finish()
    }
}

/// Signed wave index for FFT position `i` of an axis with `n` points.
fn wave_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl SpectralGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n;
        let total = n.pow(spec.dim as u32);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let k_unit = std::f64::consts::PI / spec.half_width;
        let cut = n as i64 / 3;
        let mut keys = Vec::with_capacity(total);
        let mut dealias = Vec::with_capacity(total);
        for idx in 0..total {
            let mut rest = idx;
            let mut key = 0u64;
            let mut keep = true;
            for _ in 0..spec.dim {
                let j = wave_index(rest % n, n);
                rest /= n;
                key += (j * j) as u64;
                keep &= j.abs() <= cut;
            }
            keys.push(key);
            dealias.push(keep);
        }
        let mut radial_keys = keys.clone();
        radial_keys.sort_unstable();
        radial_keys.dedup();
        let radial_slot = keys.iter().map(|k| radial_keys.binary_search(k).unwrap() as u32).collect();
        let k_sq = keys.iter().map(|&k| k as f64 * k_unit * k_unit).collect();
        Ok(SpectralGrid {
            spec,
            total,
            dx: 2.0 * spec.half_width / n as f64,
            k_unit,
            fwd,
            inv,
            k_sq,
            radial_slot,
            radial_keys,
            dealias,
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn half_width(&self) -> f64 {
        self.spec.half_width
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn spacing(&self) -> f64 {
        self.dx
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(self.spec.dim as i32)
    }

    /// Largest resolved radial frequency.
    pub fn k_max(&self) -> f64 {
        self.k_unit * (self.spec.n / 2) as f64 * (self.spec.dim as f64).sqrt()
    }

    pub fn k_sq(&self) -> &[f64] {
        &self.k_sq
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.dealias
    }

    pub fn radial_frequencies(&self) -> Vec<f64> {
        self.radial_keys.iter().map(|&k| (k as f64).sqrt() * self.k_unit).collect()
    }

    pub fn radial_slot(&self, idx: usize) -> usize {
        self.radial_slot[idx] as usize
    }

    /// Coordinates of grid point `idx`; axis 0 varies fastest.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        let mut rest = idx;
        for xa in x.iter_mut().take(self.spec.dim) {
            *xa = -self.spec.half_width + (rest % self.spec.n) as f64 * self.dx;
            rest /= self.spec.n;
        }
        x
    }

    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.point(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.total).map(|i| self.radius(i)).collect()
    }

    pub fn sample<F: Fn([f64; 3]) -> f64 + Sync>(&self, f: F) -> Vec<f64> {
        if self.total >= PARALLEL_MIN {
            (0..self.total).into_par_iter().map(|i| f(self.point(i))).collect()
        } else {
            (0..self.total).map(|i| f(self.point(i))).collect()
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.total, "field length does not match grid");
        let n = self.spec.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        let run = |buf: &mut [Complex64]| {
            if self.total >= PARALLEL_MIN {
                let lines = (buf.len() / n).div_ceil(rayon::current_num_threads()).max(1);
                buf.par_chunks_mut(lines * n).for_each(|chunk| {
                    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
                    plan.process_with_scratch(chunk, &mut scratch);
                });
            } else {
                let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(buf, &mut scratch);
            }
        };
        // axis 0 is contiguous; other axes are gathered into contiguous lines
        run(data);
        let mut stride = n;
        let mut tmp = vec![Complex64::default(); self.total];
        for _ in 1..self.spec.dim {
            let block = stride * n;
            for (b, chunk) in data.chunks(block).enumerate() {
                for i in 0..stride {
                    let line = &mut tmp[(b * stride + i) * n..(b * stride + i + 1) * n];
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = chunk[k * stride + i];
                    }
                }
            }
            run(&mut tmp);
            for (b, chunk) in data.chunks_mut(block).enumerate() {
                for i in 0..stride {
                    let line = &tmp[(b * stride + i) * n..(b * stride + i + 1) * n];
                    for (k, v) in line.iter().enumerate() {
                        chunk[k * stride + i] = *v;
                    }
                }
            }
            stride *= n;
        }
        if inverse {
            let scale = 1.0 / self.total as f64;
            data.iter_mut().for_each(|v| *v *= scale);
        }
    }

    pub fn forward(&self, field: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = field.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut data, false);
        data
    }

    pub fn forward_complex(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// Inverse transform, returning the real part and the largest discarded
    /// imaginary part.
    pub fn inverse_real(&self, spectrum: &[Complex64]) -> (Vec<f64>, f64) {
        let mut data = spectrum.to_vec();
        self.transform(&mut data, true);
        let imag = data.iter().fold(0.0_f64, |m, v| m.max(v.im.abs()));
        (data.into_iter().map(|v| v.re).collect(), imag)
    }

    /// Spectral derivative along `axis`; the Nyquist mode is dropped.
    pub fn derivative(&self, spectrum: &[Complex64], axis: usize) -> Vec<Complex64> {
        let n = self.spec.n;
        let stride = n.pow(axis as u32);
        spectrum
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let i = (idx / stride) % n;
                if i == n / 2 {
                    Complex64::default()
                } else {
                    c * Complex64::new(0.0, wave_index(i, n) as f64 * self.k_unit)
                }
            })
            .collect()
    }

    /// Spectrum of the band-limited interpolant translated by `shift` along
    /// every axis; the Nyquist mode is dropped.
    pub fn translate(&self, spectrum: &[Complex64], shift: f64) -> Vec<Complex64> {
        let n = self.spec.n;
        spectrum
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let mut rest = idx;
                let mut phase = 0.0;
                for _ in 0..self.spec.dim {
                    let i = rest % n;
                    rest /= n;
                    if i == n / 2 {
                        return Complex64::default();
                    }
                    phase += wave_index(i, n) as f64 * self.k_unit * shift;
                }
                c * Complex64::from_polar(1.0, phase)
            })
            .collect()
    }

    pub fn laplacian(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        spectrum.iter().zip(&self.k_sq).map(|(&c, &k2)| -k2 * c).collect()
    }

    pub fn integrate(&self, field: &[f64]) -> f64 {
        field.iter().sum::<f64>() * self.cell_volume()
    }

    /// `∫ a b dx` for real fields given by their spectra.
    pub fn inner_spectral(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let s: f64 = a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum();
        s * self.cell_volume() / self.total as f64
    }

    /// `∫ ∇a · ∇b dx` for real fields given by their spectra.
    pub fn gradient_inner(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let s: f64 = a.iter().zip(b).zip(&self.k_sq).map(|((x, y), k2)| k2 * (x * y.conj()).re).sum();
        s * self.cell_volume() / self.total as f64
    }

    /// Symbols at time `t` for every distinct radial frequency.
    pub fn radial_symbols(&self, prop: &Propagator, t: f64) -> Result<Vec<ModeSymbols>> {
        let freqs = self.radial_frequencies();
        let out: std::result::Result<Vec<_>, _> = if freqs.len() >= 256 {
            freqs.par_iter().map(|&r| prop.symbols(t, r)).collect()
        } else {
            freqs.iter().map(|&r| prop.symbols(t, r)).collect()
        };
        Ok(out?)
    }

    /// Fraction of spectral energy above two thirds of the Nyquist index.
    pub fn tail_fraction(&self, spectrum: &[Complex64]) -> f64 {
        let (mut all, mut tail) = (0.0, 0.0);
        for (c, keep) in spectrum.iter().zip(&self.dealias) {
            let e = c.norm_sqr();
            all += e;
            if !keep {
                tail += e;
            }
        }
        if all == 0.0 {
            0.0
        } else {
            tail / all
        }
    }
}

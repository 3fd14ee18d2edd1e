//! Compactly supported Cauchy data.

use super::grid::SpectralGrid;
use super::{Result, SolverError};
use crate::aux_ode::data_weight;
use serde::{Deserialize, Serialize};

/// `exp(-1/(1 - |x|^2))` inside the unit ball, zero outside.
pub fn bump(radius: f64) -> f64 {
    if radius >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - radius * radius)).exp()
    }
}

/// Amplitudes of the bump in the displacement and velocity data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub amp_f: f64,
    pub amp_g: f64,
}

impl Default for Profile {
    fn default() -> Self {
        Profile { amp_f: 0.0, amp_g: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyData {
    pub profile: Profile,
    pub epsilon: f64,
    /// Unscaled displacement profile; the solution starts at `epsilon f`.
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl CauchyData {
    pub fn u0(&self) -> Vec<f64> {
        self.f.iter().map(|x| self.epsilon * x).collect()
    }

    pub fn v0(&self) -> Vec<f64> {
        self.g.iter().map(|x| self.epsilon * x).collect()
    }

    /// Largest grid radius at which either profile is nonzero.
    pub fn support_radius(&self, grid: &SpectralGrid) -> f64 {
        (0..grid.len()).filter(|&i| self.f[i] != 0.0 || self.g[i] != 0.0).map(|i| grid.radius(i)).fold(0.0, f64::max)
    }
}

pub fn sample_data(grid: &SpectralGrid, profile: Profile, epsilon: f64, m: f64) -> Result<CauchyData> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(SolverError::BadData(format!("amplitude epsilon = {epsilon} must be finite and >= 0")));
    }
    if !(profile.amp_f >= 0.0 && profile.amp_g >= 0.0) {
        return Err(SolverError::BadData(format!(
            "bump amplitudes must be nonnegative, got A_f = {}, A_g = {}",
            profile.amp_f, profile.amp_g
        )));
    }
    let radii = grid.radii();
    let f: Vec<f64> = radii.iter().map(|&r| profile.amp_f * bump(r)).collect();
    let g: Vec<f64> = radii.iter().map(|&r| profile.amp_g * bump(r)).collect();
    let weight = data_weight(m)?;
    let combo: Vec<f64> = f.iter().zip(&g).map(|(a, b)| weight * a + b).collect();
    let min = combo.iter().copied().fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        return Err(SolverError::BadData(format!("a(m) f + g >= 0 violated: minimum {min:e}")));
    }
    if combo.iter().all(|&c| c == 0.0) {
        return Err(SolverError::BadData("a(m) f + g vanishes identically".into()));
    }
    Ok(CauchyData { profile, epsilon, f, g })
}

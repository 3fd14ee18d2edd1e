//! Special functions on the real line and the upper imaginary axis:
//! Gamma, modified Bessel functions of the first and second kind, and the
//! confluent hypergeometric function with its large-argument decomposition.
//!
//! Every entry point has a `_with` variant that takes an explicit
//! [`SpecFunConfig`]; the plain variants use [`SpecFunConfig::DEFAULT`].

mod bessel;
pub(crate) mod dd;
mod gamma;
mod kummer;
pub mod selftest;

pub use bessel::{
    bessel_i, bessel_i_prime, bessel_i_scaled, bessel_i_with, bessel_k, bessel_k_pair, bessel_k_pair_scaled,
    bessel_k_prime, bessel_k_reflection, bessel_k_with,
};
pub use gamma::{gamma, rgamma, sin_pi};
pub use kummer::{h_asym, kummer_phi, kummer_phi_deriv, kummer_phi_with};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecFunConfig {
    /// Relative size of the last retained series term.
    pub series_tol: f64,
    pub max_terms: usize,
    /// |z| above which Bessel I and Kummer switch to asymptotic expansions.
    pub asym_switch: f64,
    /// Half-width of the band around integer orders in which the reflection
    /// route for K averages two neighbouring orders.
    pub integer_nu_eps: f64,
}

impl SpecFunConfig {
    pub const DEFAULT: SpecFunConfig =
        SpecFunConfig { series_tol: 1e-14, max_terms: 500, asym_switch: 30.0, integer_nu_eps: 1e-6 };
}

impl Default for SpecFunConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("specfun: Gamma has a pole at x = {0}")]
    Pole(f64),
    #[error("specfun: c = {0} is a non-positive integer, Kummer series undefined")]
    KummerPole(f64),
    #[error("specfun: argument z = {0} must be {1}")]
    Domain(f64, &'static str),
    #[error("specfun: {what} did not converge within {terms} terms")]
    NoConvergence { what: &'static str, terms: usize },
    #[error("specfun: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, SpecFunError>;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Default, Debug)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

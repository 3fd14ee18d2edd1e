//! Pseudospectral solver for `u_tt - t^(2m) Δu = |u_t|^p` on a periodic box.
//!
//! Fields are advanced in Fourier space. The linear part can be evolved
//! exactly with the propagator symbols; the nonlinear problem is solved
//! either by RK4 time stepping or by Picard iteration of the Duhamel formula.

pub mod data;
pub mod duhamel;
pub mod grid;
pub mod linear;
pub mod stepper;
pub mod weak;

pub use data::{bump, sample_data, CauchyData, Profile};
pub use duhamel::{duhamel_solve, DuhamelConfig, DuhamelOutcome};
pub use grid::{GridSpec, SpectralGrid};
pub use linear::linear_evolve;
pub use stepper::{
    interpolation_floor, nonlinear_step, run_until_blowup, Diagnostics, LifespanRecord, SimConfig, SimState, Snapshot,
    Status, Trace, TraceRow, TRACE_SCHEMA_VERSION,
};
pub use weak::{weak_residual, SpaceTimeTest, WeakResidual};

use crate::aux_ode::AuxError;
use crate::propagator::PropagatorError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("solver: invalid grid: {0}")]
    BadGrid(String),
    #[error("solver: invalid data: {0}")]
    BadData(String),
    #[error("solver: invalid configuration: {0}")]
    BadConfig(String),
    #[error("solver: Picard iteration is not contracting (iterate distances {0:?})")]
    NonContraction(Vec<f64>),
    #[error("solver: Duhamel quadrature under-resolved, halving the spacing moved the answer by {change:e} (scale {scale:e})")]
    Underresolved { change: f64, scale: f64 },
    #[error("solver: trace unusable for the weak form: {0}")]
    IncompatibleTrace(String),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Aux(#[from] AuxError),
}

pub type Result<T> = std::result::Result<T, SolverError>;

/// `|v|^p` with the removable zero handled explicitly.
pub fn abs_pow(v: f64, p: f64) -> f64 {
    let a = v.abs();
    if a == 0.0 {
        0.0
    } else {
        (p * a.ln()).exp()
    }
}

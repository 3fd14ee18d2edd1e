//! Numerical laboratory for the semilinear Tricomi equation
//! `u_tt - t^(2m) Δu = |u_t|^p`.

// Validation is written as `!(x > 0.0)` so NaN fails it too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aux_ode;
pub mod blowup;
pub mod cutoff;
pub mod lifespan;
pub mod manifest;
pub mod ode;
pub mod propagator;
pub mod solver;
pub mod specfun;
pub mod symbol_bounds;

use super::data::CauchyData;
use super::grid::SpectralGrid;
use super::Result;
use crate::propagator::Propagator;
use num_complex::Complex64;

/// Spectra of `(u, u_t)` at time `t` for the linear equation.
pub fn linear_evolve_spectral(
    grid: &SpectralGrid,
    prop: &Propagator,
    f_hat: &[Complex64],
    g_hat: &[Complex64],
    t: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let table = grid.radial_symbols(prop, t)?;
    let mut u = Vec::with_capacity(grid.len());
    let mut v = Vec::with_capacity(grid.len());
    for (idx, (f, g)) in f_hat.iter().zip(g_hat).enumerate() {
        let s = &table[grid.radial_slot(idx)];
        u.push(s.v1 * f + s.v2 * g);
        v.push(s.dv1 * f + s.dv2 * g);
    }
    Ok((u, v))
}

/// Exact linear solution `(u, u_t)` at time `t` in physical space.
pub fn linear_evolve(
    grid: &SpectralGrid,
    prop: &Propagator,
    data: &CauchyData,
    t: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if t == 0.0 {
        return Ok((data.u0(), data.v0()));
    }
    let f_hat = grid.forward(&data.u0());
    let g_hat = grid.forward(&data.v0());
    let (u, v) = linear_evolve_spectral(grid, prop, &f_hat, &g_hat, t)?;
    Ok((grid.inverse_real(&u).0, grid.inverse_real(&v).0))
}

//! Periodic pseudospectral solver and residual checks for
//! `u_t + uu_x + α(t)u + β(t)u_xxxxx = 0`.

mod dense;
mod integrator;
pub mod io;
mod residual;
mod spectral;

pub use dense::{max_pointwise_residual, pointwise_residual, SmoothField, SpectralField};
pub use integrator::{calibrate_gamma, MonitorRecord, Solution, Solver, SolverConfig, C_STAB};
pub use residual::{
    central_stencil, fd_residual, fornberg_weights, spectral_residual, FdSteps, ResidualReport,
    ALIAS_THRESHOLD,
};
pub use spectral::{Field, Grid1D, Spectral};

use crate::equivalence::EquationSpec;
use crate::error::Result;

/// Sample `u(t, x)` at `2·half + 1` times centered on `t` and return the
/// spectral residual there.
pub fn residual_of_fn(
    u: &dyn Fn(f64, f64) -> f64,
    grid: &Grid1D,
    eq: &EquationSpec,
    t: f64,
    dt: f64,
    half: usize,
) -> Result<ResidualReport> {
    let fields = (0..=2 * half)
        .map(|i| {
            let s = t + (i as f64 - half as f64) * dt;
            Field::from_fn(grid, s, |x| u(s, x))
        })
        .collect::<Result<Vec<_>>>()?;
    spectral_residual(&fields, &Spectral::new(*grid), eq)
}

//! Symmetry analysis and numerics for the fifth-order KdV equation with
//! time-dependent coefficients, `u_t + α(t) u + u u_x + β(t) u_xxxxx = 0`.

pub mod error;
pub mod exprcalc;
pub mod jet;

pub use error::{Error, Result};
pub mod elliptic;
pub mod equivalence;
pub mod exactsol;
pub mod pdesolve;
pub mod reduction;
pub mod symmetry;

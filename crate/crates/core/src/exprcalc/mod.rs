//! Coefficient expressions in `t`: parsing, exact differentiation and
//! integration.

pub mod expr;
mod parse;
pub mod quad;
mod smooth;

pub use expr::{Expr, Func};
pub use parse::{parse, parse_in};
pub use smooth::SmoothFn;

/// Chebyshev points of the first kind mapped to `[lo, hi]`, increasing.
pub fn chebyshev_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let theta = std::f64::consts::PI * (2 * (n - i) - 1) as f64 / (2 * n) as f64;
            0.5 * (lo + hi) + 0.5 * (hi - lo) * theta.cos()
        })
        .collect()
}

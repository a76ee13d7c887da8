use num_complex::Complex64;
use rayon::prelude::*;

use super::residual::fornberg_weights;
use super::spectral::{Field, Grid1D, Spectral};
use crate::equivalence::EquationSpec;
use crate::error::{Error, Result};
use crate::exprcalc::SmoothFn;

/// A solution that can report `∂ₓᵏu` (`k ≤ 5`) and `u_t` at any point.
pub trait SmoothField: Sync {
    fn x_derivatives(&self, t: f64, x: f64) -> [f64; 6];
    fn t_derivative(&self, t: f64, x: f64) -> f64;

    fn value(&self, t: f64, x: f64) -> f64 {
        self.x_derivatives(t, x)[0]
    }
}

/// `u_t + uu_x + αu + βu_xxxxx` at one point.
pub fn pointwise_residual(f: &dyn SmoothField, eq: &EquationSpec, t: f64, x: f64) -> f64 {
    let d = f.x_derivatives(t, x);
    f.t_derivative(t, x) + d[0] * d[1] + eq.alpha().value(t) * d[0] + eq.beta().value(t) * d[5]
}

/// Largest pointwise residual over `times × xs`; non-finite counts as
/// infinite. Points are spread over the rayon pool.
pub fn max_pointwise_residual(
    f: &dyn SmoothField,
    eq: &EquationSpec,
    times: &[f64],
    xs: &[f64],
) -> f64 {
    times
        .par_iter()
        .flat_map_iter(|&t| xs.iter().map(move |&x| (t, x)))
        .map(|(t, x)| {
            let r = pointwise_residual(f, eq, t, x);
            if r.is_finite() {
                r.abs()
            } else {
                f64::INFINITY
            }
        })
        .reduce(|| 0.0, f64::max)
}

/// Solver snapshots turned into a field defined for all `t` in the run.
///
/// Interpolation is done on `v = exp(ik⁵B + A) û`, which carries no
/// dispersive rotation, so a short Lagrange stencil in `t` suffices and
/// `u_t` keeps the exact linear part.
#[derive(Clone, Debug)]
pub struct SpectralField {
    spectral: Spectral,
    times: Vec<f64>,
    v: Vec<Vec<Complex64>>,
    beta: SmoothFn,
    beta_int: SmoothFn,
    alpha: SmoothFn,
    alpha_int: SmoothFn,
    k5: Vec<f64>,
    stencil: usize,
}

impl SpectralField {
    /// `series` must be in increasing time order with at least `stencil`
    /// snapshots.
    pub fn new(grid: Grid1D, eq: &EquationSpec, series: &[Field], stencil: usize) -> Result<Self> {
        if stencil < 2 || series.len() < stencil {
            return Err(Error::Invalid(format!(
                "need at least {stencil} snapshots (stencil >= 2), got {}",
                series.len()
            )));
        }
        if series.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::Invalid("snapshot times must increase".into()));
        }
        let spectral = Spectral::new(grid);
        let k5: Vec<f64> = (0..grid.len())
            .map(|j| grid.wavenumber(j).powi(5))
            .collect();
        let beta_int = eq.beta().integral();
        let alpha_int = eq.a_integral().clone();
        let v = series
            .iter()
            .map(|f| {
                let (b, a) = (beta_int.value(f.t), alpha_int.value(f.t));
                spectral
                    .forward(&f.values)
                    .into_iter()
                    .zip(&k5)
                    .map(|(c, &k)| c * Complex64::from_polar(a.exp(), k * b))
                    .collect()
            })
            .collect();
        Ok(SpectralField {
            spectral,
            times: series.iter().map(|f| f.t).collect(),
            v,
            beta: eq.beta().clone(),
            beta_int,
            alpha: eq.alpha().clone(),
            alpha_int,
            k5,
            stencil,
        })
    }

    pub fn span(&self) -> (f64, f64) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    /// `û` and `û_t` at time `t`.
    fn spectra(&self, t: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let m = self.stencil;
        let i = self.times.partition_point(|&s| s < t);
        let start = i.saturating_sub(m / 2).min(self.times.len() - m);
        let nodes = &self.times[start..start + m];
        let w0 = fornberg_weights(t, nodes, 0);
        let w1 = fornberg_weights(t, nodes, 1);
        let (b, a) = (self.beta_int.value(t), self.alpha_int.value(t));
        let (beta, alpha) = (self.beta.value(t), self.alpha.value(t));
        let n = self.k5.len();
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        let mut ut = u.clone();
        for j in 0..n {
            let (mut v, mut dv) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for (s, (c0, c1)) in w0.iter().zip(&w1).enumerate() {
                v += self.v[start + s][j] * *c0;
                dv += self.v[start + s][j] * *c1;
            }
            let back = Complex64::from_polar((-a).exp(), -self.k5[j] * b);
            u[j] = back * v;
            ut[j] = -Complex64::new(alpha, beta * self.k5[j]) * u[j] + back * dv;
        }
        (u, ut)
    }

    /// Trigonometric interpolant of `spec` and its `order`-th derivative.
    fn point(&self, spec: &[Complex64], x: f64, order: u32) -> f64 {
        let g = self.spectral.grid();
        let n = g.len() as f64;
        spec.iter()
            .enumerate()
            .map(|(j, c)| {
                let phase = Complex64::from_polar(1.0, g.wavenumber(j) * x);
                (c * self.spectral.symbol(j, order) * phase).re
            })
            .sum::<f64>()
            / n
    }
}

impl SmoothField for SpectralField {
    fn x_derivatives(&self, t: f64, x: f64) -> [f64; 6] {
        let (u, _) = self.spectra(t);
        std::array::from_fn(|k| self.point(&u, x, k as u32))
    }

    fn t_derivative(&self, t: f64, x: f64) -> f64 {
        let (_, ut) = self.spectra(t);
        self.point(&ut, x, 0)
    }
}

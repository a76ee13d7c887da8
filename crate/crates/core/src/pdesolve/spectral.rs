use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid `x_j = jL/N` on `[0, L)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    l: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(l: f64, n: usize) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Invalid(format!(
                "domain length must be positive, got {l}"
            )));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Invalid(format!(
                "point count must be a power of two and at least 16, got {n}"
            )));
        }
        Ok(Grid1D { l, n })
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed mode index of FFT slot `j`.
    pub fn mode(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j <= n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI * self.mode(j) as f64 / self.l
    }

    /// Largest wavenumber kept by the 2/3 rule.
    pub fn dealiased_kmax(&self) -> f64 {
        2.0 * PI * (self.n / 3) as f64 / self.l
    }

    /// Sample `f` at the collocation points.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.points().into_iter().map(f).collect()
    }

    /// Trapezoidal (spectrally accurate) integral over one period.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.dx() * values.iter().sum::<f64>()
    }
}

/// Snapshot of `u` at the collocation points.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub t: f64,
    pub values: Vec<f64>,
}

impl Field {
    pub fn new(t: f64, values: Vec<f64>) -> Result<Self> {
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "field value {j} at t = {t} is not finite"
            )));
        }
        Ok(Field { t, values })
    }

    pub fn from_fn(grid: &Grid1D, t: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(t, grid.sample(f))
    }

    pub fn zeros(grid: &Grid1D, t: f64) -> Self {
        Field {
            t,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// FFT plans and spectral derivative operators for one grid.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid1D,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Spectral({:?})", self.grid)
    }
}

impl Spectral {
    pub fn new(grid: Grid1D) -> Self {
        let mut planner = FftPlanner::new();
        Spectral {
            grid,
            fwd: planner.plan_fft_forward(grid.len()),
            inv: planner.plan_fft_inverse(grid.len()),
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn forward(&self, u: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        buf
    }

    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let mut buf = spec.to_vec();
        self.inv.process(&mut buf);
        let scale = 1.0 / self.grid.len() as f64;
        buf.into_iter().map(|c| c.re * scale).collect()
    }

    /// Multiplier `(ik)^order` of FFT slot `j`; the Nyquist slot is dropped
    /// for odd orders.
    pub fn symbol(&self, j: usize, order: u32) -> Complex64 {
        let n = self.grid.len();
        if order % 2 == 1 && j == n / 2 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, self.grid.wavenumber(j)).powu(order)
    }

    pub fn derivative_spec(&self, spec: &[Complex64], order: u32) -> Vec<Complex64> {
        spec.iter()
            .enumerate()
            .map(|(j, &c)| c * self.symbol(j, order))
            .collect()
    }

    pub fn derivative(&self, u: &[f64], order: u32) -> Vec<f64> {
        self.inverse(&self.derivative_spec(&self.forward(u), order))
    }

    /// Whether slot `j` survives 2/3 truncation.
    pub fn keeps(&self, j: usize) -> bool {
        self.grid.mode(j).unsigned_abs() as usize <= self.grid.len() / 3
    }

    pub fn truncate(&self, spec: &mut [Complex64]) {
        for (j, c) in spec.iter_mut().enumerate() {
            if !self.keeps(j) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Share of spectral energy in the top third of the modes.
    pub fn top_third_ratio(&self, u: &[f64]) -> f64 {
        let spec = self.forward(u);
        let total: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let top: f64 = spec
            .iter()
            .enumerate()
            .filter(|(j, _)| !self.keeps(*j))
            .map(|(_, c)| c.norm_sqr())
            .sum();
        top / total
    }
}

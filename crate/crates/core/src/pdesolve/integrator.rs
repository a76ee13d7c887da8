use num_complex::Complex64;

use super::spectral::{Field, Grid1D, Spectral};
use crate::equivalence::EquationSpec;
use crate::error::{Error, Result};
use crate::exprcalc::SmoothFn;

/// Advective stability constant of classical RK4 on the imaginary axis.
pub const C_STAB: f64 = 2.8;
const BLOW_UP: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    /// 2/3 truncation of the quadratic term.
    pub dealias: bool,
    /// Steps between stored snapshots.
    pub monitor_stride: usize,
    /// Set to false to integrate the linear part only.
    pub nonlinear: bool,
    /// Weight of `(u_xx)²` in the third density; `3β(t)` when unset.
    pub gamma: Option<f64>,
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        SolverConfig {
            dt,
            t_end,
            dealias: true,
            monitor_stride: 1,
            nonlinear: true,
            gamma: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Invalid(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !self.t_end.is_finite() {
            return Err(Error::Invalid("t_end must be finite".into()));
        }
        if self.monitor_stride == 0 {
            return Err(Error::Invalid("monitor_stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Integrals of the candidate conserved densities at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonitorRecord {
    pub t: f64,
    /// `∫u`.
    pub mass: f64,
    /// `∫u²`.
    pub momentum2: f64,
    /// `∫(u³ + γ u_xx²)`.
    pub density3: f64,
    /// `∫u³`.
    pub cubic: f64,
    /// `∫u_xx²`.
    pub curvature: f64,
    pub gamma: f64,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub series: Vec<Field>,
    pub monitors: Vec<MonitorRecord>,
    pub steps: usize,
    /// Step actually used (the span is divided evenly).
    pub dt: f64,
}

impl Solution {
    pub fn last(&self) -> &Field {
        self.series.last().expect("series holds the initial field")
    }

    /// Largest relative change of `∫u` and `∫u²` over the run.
    pub fn invariant_drift(&self) -> (f64, f64) {
        let first = self.monitors[0];
        let rel = |a: f64, b: f64, scale: f64| (a - b).abs() / scale.max(f64::MIN_POSITIVE);
        let mass_scale = first.mass.abs().max(first.momentum2.sqrt());
        self.monitors.iter().fold((0.0, 0.0), |(m, q), r| {
            (
                m.max(rel(r.mass, first.mass, mass_scale)),
                q.max(rel(r.momentum2, first.momentum2, first.momentum2)),
            )
        })
    }
}

/// Integrating-factor RK4 solver for one equation on one grid.
///
/// In Fourier space `û_t = −(iβk⁵ + α)û + N(û)`. With `B = ∫β`, `A = ∫α`
/// the variable `v = exp(ik⁵(B(t)−B(tₙ)) + A(t)−A(tₙ)) û` has no stiff
/// part, and RK4 is applied to `v` over each step. The linear part is
/// exact, so the step is limited only by advection:
/// `dt · max|u| · k_max ≤ C_STAB` (with `k_max` the largest retained
/// wavenumber). A scheme without the factor would instead need
/// `dt ≲ C_STAB / (max|β| (πN/L)⁵)`.
#[derive(Clone, Debug)]
pub struct Solver {
    spectral: Spectral,
    beta_int: SmoothFn,
    alpha_int: SmoothFn,
    interval: (f64, f64),
    k5: Vec<f64>,
    beta: SmoothFn,
}

impl Solver {
    pub fn new(grid: Grid1D, eq: &EquationSpec) -> Self {
        let spectral = Spectral::new(grid);
        let k5 = (0..grid.len())
            .map(|j| grid.wavenumber(j).powi(5))
            .collect();
        Solver {
            spectral,
            beta_int: eq.beta().integral(),
            alpha_int: eq.a_integral().clone(),
            interval: eq.interval(),
            k5,
            beta: eq.beta().clone(),
        }
    }

    pub fn grid(&self) -> &Grid1D {
        self.spectral.grid()
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.interval;
        let slack = 1e-12 * (hi - lo).max(1.0);
        if t < lo - slack || t > hi + slack {
            return Err(Error::OutOfInterval { t, lo, hi });
        }
        Ok(())
    }

    /// Largest stable step for data of size `max_u`.
    pub fn stable_dt(&self, max_u: f64, dealias: bool) -> f64 {
        let g = self.grid();
        let kmax = if dealias {
            g.dealiased_kmax()
        } else {
            std::f64::consts::PI * g.len() as f64 / g.length()
        };
        if max_u == 0.0 {
            f64::INFINITY
        } else {
            C_STAB / (max_u * kmax)
        }
    }

    /// `exp(ik⁵ΔB + ΔA)` for every slot.
    fn factor(&self, d_b: f64, d_a: f64) -> Vec<Complex64> {
        self.k5
            .iter()
            .map(|&k5| Complex64::from_polar(d_a.exp(), k5 * d_b))
            .collect()
    }

    /// `−F[(u²/2)_x]`, truncated when dealiasing.
    fn nonlinear(&self, spec: &[Complex64], dealias: bool) -> Vec<Complex64> {
        let sp = &self.spectral;
        let mut s = spec.to_vec();
        if dealias {
            sp.truncate(&mut s);
        }
        let u = sp.inverse(&s);
        let sq: Vec<f64> = u.iter().map(|v| 0.5 * v * v).collect();
        let mut out = sp.derivative_spec(&sp.forward(&sq), 1);
        if dealias {
            sp.truncate(&mut out);
        }
        out.iter_mut().for_each(|c| *c = -*c);
        out
    }

    fn step_spec(
        &self,
        spec: &[Complex64],
        t: f64,
        dt: f64,
        cfg: &SolverConfig,
    ) -> Result<Vec<Complex64>> {
        let b0 = self.beta_int.value(t);
        let a0 = self.alpha_int.value(t);
        let th = t + 0.5 * dt;
        let t1 = t + dt;
        let eh = self.factor(self.beta_int.value(th) - b0, self.alpha_int.value(th) - a0);
        let e1 = self.factor(self.beta_int.value(t1) - b0, self.alpha_int.value(t1) - a0);
        if eh
            .iter()
            .chain(&e1)
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::Quadrature(format!(
                "integrating factor is not finite on [{t}, {t1}]"
            )));
        }
        if !cfg.nonlinear {
            return Ok(spec.iter().zip(&e1).map(|(u, e)| u / e).collect());
        }
        let n = spec.len();
        let axpy =
            |base: &[Complex64], k: &[Complex64], h: f64, e: &[Complex64]| -> Vec<Complex64> {
                (0..n).map(|j| (base[j] + k[j] * h) / e[j]).collect()
            };
        let ka = self.nonlinear(spec, cfg.dealias);
        let kb: Vec<Complex64> = self
            .nonlinear(&axpy(spec, &ka, 0.5 * dt, &eh), cfg.dealias)
            .iter()
            .zip(&eh)
            .map(|(g, e)| g * e)
            .collect();
        let kc: Vec<Complex64> = self
            .nonlinear(&axpy(spec, &kb, 0.5 * dt, &eh), cfg.dealias)
            .iter()
            .zip(&eh)
            .map(|(g, e)| g * e)
            .collect();
        let kd: Vec<Complex64> = self
            .nonlinear(&axpy(spec, &kc, dt, &e1), cfg.dealias)
            .iter()
            .zip(&e1)
            .map(|(g, e)| g * e)
            .collect();
        Ok((0..n)
            .map(|j| (spec[j] + (ka[j] + (kb[j] + kc[j]) * 2.0 + kd[j]) * (dt / 6.0)) / e1[j])
            .collect())
    }

    fn check_field(&self, u: &[f64], t: f64, dt: f64, cfg: &SolverConfig) -> Result<()> {
        let m = u.iter().fold(0.0f64, |m, v| {
            if v.is_finite() {
                m.max(v.abs())
            } else {
                f64::INFINITY
            }
        });
        if !m.is_finite() || m > BLOW_UP {
            return Err(Error::BlowUp {
                at: t,
                msg: format!("max|u| = {m}"),
            });
        }
        if cfg.nonlinear && dt > self.stable_dt(m, cfg.dealias) * (1.0 + 1e-12) {
            return Err(Error::Invalid(format!(
                "dt = {dt} exceeds the stability bound {} at t = {t}",
                self.stable_dt(m, cfg.dealias)
            )));
        }
        Ok(())
    }

    /// One step of size `cfg.dt`.
    pub fn step(&self, u: &Field, cfg: &SolverConfig) -> Result<Field> {
        cfg.validate()?;
        self.check_time(u.t)?;
        self.check_time(u.t + cfg.dt)?;
        self.check_field(&u.values, u.t, cfg.dt, cfg)?;
        let spec = self.step_spec(&self.spectral.forward(&u.values), u.t, cfg.dt, cfg)?;
        let values = self.spectral.inverse(&spec);
        let t1 = u.t + cfg.dt;
        self.check_field(&values, t1, 0.0, cfg)?;
        Field::new(t1, values)
    }

    pub fn monitor(&self, u: &Field, gamma: Option<f64>) -> MonitorRecord {
        let g = self.grid();
        let uxx = self.spectral.derivative(&u.values, 2);
        let cubic = g.integrate(&u.values.iter().map(|v| v * v * v).collect::<Vec<_>>());
        let curvature = g.integrate(&uxx.iter().map(|v| v * v).collect::<Vec<_>>());
        let gamma = gamma.unwrap_or_else(|| 3.0 * self.beta.value(u.t));
        MonitorRecord {
            t: u.t,
            mass: g.integrate(&u.values),
            momentum2: g.integrate(&u.values.iter().map(|v| v * v).collect::<Vec<_>>()),
            density3: cubic + gamma * curvature,
            cubic,
            curvature,
            gamma,
        }
    }

    /// Integrate from `u0.t` to `cfg.t_end`. The span is split into equal
    /// steps no longer than `cfg.dt`.
    pub fn solve(&self, u0: &Field, cfg: &SolverConfig) -> Result<Solution> {
        cfg.validate()?;
        if u0.values.len() != self.grid().len() {
            return Err(Error::Invalid(format!(
                "field has {} points, grid has {}",
                u0.values.len(),
                self.grid().len()
            )));
        }
        let span = cfg.t_end - u0.t;
        if span < 0.0 {
            return Err(Error::Invalid(format!(
                "t_end {} precedes t0 {}",
                cfg.t_end, u0.t
            )));
        }
        self.check_time(u0.t)?;
        self.check_time(cfg.t_end)?;
        let steps = (span / cfg.dt - 1e-9).ceil().max(0.0) as usize;
        let dt = if steps == 0 {
            cfg.dt
        } else {
            span / steps as f64
        };
        let step_cfg = SolverConfig { dt, ..cfg.clone() };
        let mut series = vec![u0.clone()];
        let mut monitors = vec![self.monitor(u0, cfg.gamma)];
        let mut spec = self.spectral.forward(&u0.values);
        let mut values = u0.values.clone();
        for i in 0..steps {
            let t = u0.t + i as f64 * dt;
            self.check_field(&values, t, dt, &step_cfg)?;
            spec = self.step_spec(&spec, t, dt, &step_cfg)?;
            values = self.spectral.inverse(&spec);
            let t1 = if i + 1 == steps {
                cfg.t_end
            } else {
                u0.t + (i + 1) as f64 * dt
            };
            if (i + 1) % cfg.monitor_stride == 0 || i + 1 == steps {
                self.check_field(&values, t1, 0.0, &step_cfg)?;
                let f = Field::new(t1, values.clone())?;
                monitors.push(self.monitor(&f, cfg.gamma));
                series.push(f);
            }
        }
        Ok(Solution {
            series,
            monitors,
            steps,
            dt,
        })
    }
}

/// Weight `γ` that minimizes the end-to-end drift of `∫(u³ + γ u_xx²)`.
pub fn calibrate_gamma(monitors: &[MonitorRecord]) -> Result<f64> {
    if monitors.len() < 2 {
        return Err(Error::Invalid(
            "calibration needs at least two records".into(),
        ));
    }
    let first = &monitors[0];
    // Least squares over all records of (ΔC + γΔQ).
    let (mut num, mut den) = (0.0, 0.0);
    for r in monitors {
        let dc = r.cubic - first.cubic;
        let dq = r.curvature - first.curvature;
        num += dc * dq;
        den += dq * dq;
    }
    if den == 0.0 {
        return Err(Error::Numerical(
            "curvature integral did not change; gamma is undetermined".into(),
        ));
    }
    Ok(-num / den)
}

use super::spectral::{Field, Spectral};
use crate::equivalence::EquationSpec;
use crate::error::{Error, Result};

/// Top-third energy share above which aliasing is reported.
pub const ALIAS_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    /// Max-norm of `u_t + uu_x + αu + βu_xxxxx` at the middle snapshot.
    pub max: f64,
    pub t: f64,
    pub alias_ratio: f64,
    pub aliasing_warning: bool,
}

/// Centered first-derivative weights on `2h+1` equally spaced points.
fn central_first(half: usize) -> &'static [f64] {
    match half {
        1 => &[-0.5, 0.0, 0.5],
        2 => &[1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0],
        _ => &[
            -1.0 / 60.0,
            9.0 / 60.0,
            -45.0 / 60.0,
            0.0,
            45.0 / 60.0,
            -9.0 / 60.0,
            1.0 / 60.0,
        ],
    }
}

/// Residual of the equation at the middle of an odd number of equally
/// spaced snapshots. `u_t` uses the widest centered difference available
/// (orders 2, 4 or 6); `x`-derivatives are spectral.
pub fn spectral_residual(
    fields: &[Field],
    spectral: &Spectral,
    eq: &EquationSpec,
) -> Result<ResidualReport> {
    if fields.len() < 3 || fields.len().is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "need an odd number (at least 3) of snapshots, got {}",
            fields.len()
        )));
    }
    let n = spectral.grid().len();
    if fields.iter().any(|f| f.values.len() != n) {
        return Err(Error::Invalid(
            "snapshot size does not match the grid".into(),
        ));
    }
    let dt = fields[1].t - fields[0].t;
    if !(dt > 0.0) {
        return Err(Error::Invalid("snapshot times must increase".into()));
    }
    for w in fields.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.max(w[1].t.abs() * 1e-6) {
            return Err(Error::Invalid(
                "snapshot times are not uniformly spaced".into(),
            ));
        }
    }
    let mid = fields.len() / 2;
    let half = mid.min(3);
    let w = central_first(half);
    let t = fields[mid].t;
    let u = &fields[mid].values;
    let ux = spectral.derivative(u, 1);
    let u5 = spectral.derivative(u, 5);
    let (alpha, beta) = (eq.alpha().value(t), eq.beta().value(t));
    let mut max: f64 = 0.0;
    for j in 0..n {
        let ut: f64 = w
            .iter()
            .enumerate()
            .map(|(i, c)| c * fields[mid + i - half].values[j])
            .sum::<f64>()
            / dt;
        let r = ut + u[j] * ux[j] + alpha * u[j] + beta * u5[j];
        max = max.max(if r.is_finite() {
            r.abs()
        } else {
            f64::INFINITY
        });
    }
    let alias_ratio = spectral.top_third_ratio(u);
    Ok(ResidualReport {
        max,
        t,
        alias_ratio,
        aliasing_warning: alias_ratio > ALIAS_THRESHOLD,
    })
}

/// Fornberg weights for the `m`-th derivative at `z` from nodes `x`.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Centered stencil of accuracy order `order` (even) for the `m`-th
/// derivative with unit spacing: offsets `−h..=h` and weights.
pub fn central_stencil(m: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let half = m.div_ceil(2) + order / 2 - 1;
    let offsets: Vec<f64> = (-(half as i64)..=half as i64).map(|k| k as f64).collect();
    let w = fornberg_weights(0.0, &offsets, m);
    (offsets, w)
}

/// Steps of the finite-difference residual path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdSteps {
    pub h: f64,
    pub ht: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        FdSteps { h: 0.1, ht: 0.01 }
    }
}

/// Residual of a closed-form `u(t, x)` on a bounded window, with sixth-order
/// centered differences in `x` and `t`. For data that are not periodic.
pub fn fd_residual(
    u: &dyn Fn(f64, f64) -> f64,
    eq: &EquationSpec,
    t: f64,
    window: (f64, f64),
    points: usize,
    steps: FdSteps,
) -> Result<f64> {
    if points < 2 || !(window.1 > window.0) {
        return Err(Error::Invalid(
            "window must be nonempty with at least 2 points".into(),
        ));
    }
    let (o1, w1) = central_stencil(1, 6);
    let (o5, w5) = central_stencil(5, 6);
    let (alpha, beta) = (eq.alpha().value(t), eq.beta().value(t));
    let FdSteps { h, ht } = steps;
    let mut max: f64 = 0.0;
    for i in 0..points {
        let x = window.0 + (window.1 - window.0) * i as f64 / (points - 1) as f64;
        let d = |o: &[f64], w: &[f64], f: &dyn Fn(f64) -> f64, step: f64, p: u32| -> f64 {
            o.iter().zip(w).map(|(k, c)| c * f(*k)).sum::<f64>() / step.powi(p as i32)
        };
        let ut = d(&o1, &w1, &|k| u(t + k * ht, x), ht, 1);
        let ux = d(&o1, &w1, &|k| u(t, x + k * h), h, 1);
        let u5 = d(&o5, &w5, &|k| u(t, x + k * h), h, 5);
        let v = u(t, x);
        let r = ut + v * ux + alpha * v + beta * u5;
        max = max.max(if r.is_finite() {
            r.abs()
        } else {
            f64::INFINITY
        });
    }
    Ok(max)
}

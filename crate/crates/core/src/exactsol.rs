//! The `cn⁴` solution family of the reducible equations
//! `u_t + uu_x + α(t)u − e^{−A}Z³u_xxxxx = 0`, `Z = c1 T + c2`.

use std::f64::consts::SQRT_2;

use crate::elliptic::{cn_power_period, sn_cn_dn_jet};
use crate::equivalence::EquationSpec;
use crate::error::{Error, Result};
use crate::exprcalc::expr::{self, Expr};
use crate::exprcalc::SmoothFn;
use crate::jet::Jet;
use crate::pdesolve::{Field, Grid1D, SmoothField};

/// Elliptic modulus of the profile.
pub const MODULUS: f64 = SQRT_2 / 2.0;
const LEAD: f64 = 105.0 / 16.0;
const DRIFT: f64 = 21.0 / 8.0;

#[derive(Clone, Debug)]
pub struct Cn4Params {
    /// Amplitude scale, positive.
    pub a: f64,
    /// Phase shift.
    pub b: f64,
    /// Space shift.
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    /// `α` on the working window.
    pub alpha: SmoothFn,
}

impl Cn4Params {
    pub fn new(alpha: SmoothFn, a: f64, b: f64, d: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Invalid(format!(
                "amplitude a must be positive, got {a}"
            )));
        }
        if c1 == 0.0 && c2 == 0.0 {
            return Err(Error::Invalid("c1 and c2 cannot both vanish".into()));
        }
        if ![b, d, c1, c2].iter().all(|v| v.is_finite()) {
            return Err(Error::Invalid("parameters must be finite".into()));
        }
        Ok(Cn4Params {
            a,
            b,
            d,
            c1,
            c2,
            alpha,
        })
    }

    /// Argument scale `(√2/4) a^{1/4}`.
    pub fn scale(&self) -> f64 {
        SQRT_2 / 4.0 * self.a.powf(0.25)
    }
}

/// Gauge data `(A, e^{−A}, T)` of `α` on its interval.
fn gauge_parts(alpha: &SmoothFn) -> Result<EquationSpec> {
    EquationSpec::new(alpha.clone(), SmoothFn::constant(1.0, alpha.interval()))
}

fn z_fn(eq: &EquationSpec, c1: f64, c2: f64) -> Result<SmoothFn> {
    let iv = eq.interval();
    let z = match eq.gauge_time().expr() {
        Some(t) => SmoothFn::from_expr(
            expr::add(expr::mul(Expr::Num(c1), t.clone()), Expr::Num(c2)),
            iv,
        )?,
        None => {
            let t = eq.gauge_time().clone();
            SmoothFn::from_jet_fn(format!("Z[{c1}, {c2}]"), iv, move |s| t.jet(s) * c1 + c2)
        }
    };
    let sign = z.value(iv.0).signum();
    for s in eq.sample_points() {
        let v = z.value(s);
        if v == 0.0 || v.signum() != sign || !v.is_finite() {
            return Err(Error::Invalid(format!(
                "Z = c1 T + c2 vanishes near t = {s}"
            )));
        }
    }
    Ok(z)
}

/// The equation carrying the family: `α` as given, `β = −e^{−A}Z³`.
pub fn cn4_equation(p: &Cn4Params) -> Result<EquationSpec> {
    let g = gauge_parts(&p.alpha)?;
    let z = z_fn(&g, p.c1, p.c2)?;
    let iv = g.interval();
    let beta = match (g.exp_neg_a().expr(), z.expr()) {
        (Some(e), Some(ze)) => SmoothFn::from_expr(
            expr::neg(expr::mul(e.clone(), expr::pow(ze.clone(), 3.0))),
            iv,
        )?,
        _ => {
            let (e, z) = (g.exp_neg_a().clone(), z.clone());
            SmoothFn::from_jet_fn("-exp(-A)*Z^3", iv, move |s| -(e.jet(s) * z.jet(s).powi(3)))
        }
    };
    EquationSpec::new(p.alpha.clone(), beta)
}

/// Closed-form field of one parameter set, with its equation.
#[derive(Clone, Debug)]
pub struct Cn4Field {
    params: Cn4Params,
    eq: EquationSpec,
    z: SmoothFn,
    /// `J = ∫ e^{−A}/Z²` from the shared base point.
    j: SmoothFn,
}

impl Cn4Field {
    pub fn new(params: Cn4Params) -> Result<Self> {
        let eq = cn4_equation(&params)?;
        let z = z_fn(&eq, params.c1, params.c2)?;
        let iv = eq.interval();
        let integrand = match (eq.exp_neg_a().expr(), z.expr()) {
            (Some(e), Some(ze)) => {
                SmoothFn::from_expr(expr::div(e.clone(), expr::pow(ze.clone(), 2.0)), iv)?
            }
            _ => {
                let (e, z) = (eq.exp_neg_a().clone(), z.clone());
                SmoothFn::from_jet_fn("exp(-A)/Z^2", iv, move |s| e.jet(s) / z.jet(s).powi(2))
            }
        };
        let j = integrand.with_t_ref(eq.t_ref()).integral();
        Ok(Cn4Field { params, eq, z, j })
    }

    pub fn params(&self) -> &Cn4Params {
        &self.params
    }

    pub fn equation(&self) -> &EquationSpec {
        &self.eq
    }

    /// `u` with `t` and `x` both expanded: returns the jet in `x` at fixed
    /// `t` when `in_x`, otherwise the jet in `t` at fixed `x`.
    fn jet(&self, t: f64, x: f64, in_x: bool) -> Jet {
        let p = &self.params;
        let s = p.scale();
        let xj = if in_x { Jet::var(x) } else { Jet::constant(x) };
        let at = |f: &SmoothFn| {
            if in_x {
                Jet::constant(f.value(t))
            } else {
                f.jet(t)
            }
        };
        let z = at(&self.z);
        let j = at(&self.j);
        let e_a = at(self.eq.exp_neg_a()).recip();
        let shifted = xj + p.d;
        let theta = (shifted / z - j * (DRIFT * p.a)) * s + p.b;
        let (_, cn, _) = sn_cn_dn_jet(theta, MODULUS);
        (cn.powi(4) * (LEAD * p.a) + shifted * p.c1) / (e_a * z)
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        self.jet(t, x, true).value()
    }

    /// `u_t + uu_x + αu + βu_xxxxx` by exact differentiation.
    pub fn residual_at(&self, t: f64, x: f64) -> f64 {
        let jx = self.jet(t, x, true);
        let jt = self.jet(t, x, false);
        let u = jx.value();
        jt.d1() + u * jx.d1() + self.eq.alpha().value(t) * u + self.eq.beta().value(t) * jx.d(5)
    }

    /// Spatial period `2K/s · |Z|` when `c1 = 0`.
    pub fn spatial_period(&self) -> Option<f64> {
        if self.params.c1 != 0.0 {
            return None;
        }
        let k2 = cn_power_period(MODULUS).ok()?;
        Some(k2 / self.params.scale() * self.params.c2.abs())
    }

    /// Rigid translation speed `(21/8)a/c2` for `α = 0`, `c1 = 0`.
    pub fn phase_speed(&self) -> Option<f64> {
        (self.params.c1 == 0.0 && self.eq.is_alpha_zero())
            .then(|| DRIFT * self.params.a / self.params.c2)
    }

    /// Grid spanning `periods` spatial periods with `n` points.
    pub fn matched_grid(&self, periods: usize, n: usize) -> Result<Grid1D> {
        let l = self
            .spatial_period()
            .ok_or_else(|| Error::Unsupported("the field is periodic only when c1 = 0".into()))?;
        Grid1D::new(l * periods.max(1) as f64, n)
    }

    pub fn sample(&self, grid: &Grid1D, t: f64) -> Result<Field> {
        Field::from_fn(grid, t, |x| self.value(t, x))
    }

    /// Max of the exact-differentiation residual over a window.
    pub fn max_residual(&self, times: &[f64], window: (f64, f64), points: usize) -> f64 {
        let mut m: f64 = 0.0;
        for &t in times {
            for i in 0..points {
                let x = window.0 + (window.1 - window.0) * i as f64 / (points.max(2) - 1) as f64;
                let r = self.residual_at(t, x);
                m = m.max(if r.is_finite() {
                    r.abs()
                } else {
                    f64::INFINITY
                });
            }
        }
        m
    }
}

impl SmoothField for Cn4Field {
    fn x_derivatives(&self, t: f64, x: f64) -> [f64; 6] {
        let j = self.jet(t, x, true);
        std::array::from_fn(|k| j.d(k))
    }

    fn t_derivative(&self, t: f64, x: f64) -> f64 {
        self.jet(t, x, false).d1()
    }
}

/// Closed-form field generator of one parameter set.
pub fn cn4_field(p: Cn4Params) -> Result<Cn4Field> {
    Cn4Field::new(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::elliptic_k;
    use crate::pdesolve::residual_of_fn;

    fn params(alpha: &str, iv: (f64, f64), c1: f64, c2: f64) -> Cn4Params {
        Cn4Params::new(SmoothFn::parse(alpha, iv).unwrap(), 1.0, 0.0, 0.0, c1, c2).unwrap()
    }

    #[test]
    fn equation_coefficients() {
        let eq = cn4_equation(&params("0", (0.0, 1.0), 0.0, 1.0)).unwrap();
        assert_eq!(eq.beta().as_constant(), Some(-1.0));
        let eq = cn4_equation(&params("0", (0.5, 1.5), 1.0, 0.0)).unwrap();
        for t in [0.6, 1.0, 1.4] {
            assert!((eq.beta().value(t) + t.powi(3)).abs() < 1e-12);
        }
        assert!(cn4_equation(&params("0", (-1.0, 1.0), 1.0, 0.0)).is_err());
    }

    #[test]
    fn peak_and_zero() {
        let f = cn4_field(params("0", (0.0, 1.0), 0.0, 1.0)).unwrap();
        assert!((f.value(0.0, 0.0) - 6.5625).abs() < 1e-14);
        let x0 = elliptic_k(MODULUS).unwrap() / f.params().scale();
        assert!(f.value(0.0, x0).abs() < 1e-12);
    }

    #[test]
    fn exact_residual_vanishes() {
        for (alpha, iv, c1, c2) in [
            ("0", (0.0, 1.0), 0.0, 1.0),
            ("0", (0.5, 1.5), 1.0, 0.5),
            ("1", (0.0, 1.0), 0.7, 1.0),
            ("sin(t)", (0.0, 1.0), -0.3, 2.0),
        ] {
            let f = cn4_field(params(alpha, iv, c1, c2)).unwrap();
            let r = f.max_residual(&[iv.0 + 0.3, iv.1 - 0.2], (-4.0, 4.0), 33);
            assert!(r < 1e-8, "{alpha} {c1} {c2}: {r}");
        }
    }

    #[test]
    fn spectral_residual_on_matched_grid() {
        let f = cn4_field(params("0", (0.0, 1.0), 0.0, 1.0)).unwrap();
        let g = f.matched_grid(1, 128).unwrap();
        let r = residual_of_fn(&|t, x| f.value(t, x), &g, f.equation(), 0.5, 1e-3, 3).unwrap();
        assert!(r.max < 1e-6, "{r:?}");
    }

    #[test]
    fn profile_translates() {
        let f = cn4_field(params("0", (0.0, 1.0), 0.0, 1.3)).unwrap();
        let c = f.phase_speed().unwrap();
        for (t, x) in [(0.2, 0.4), (0.9, -2.0), (0.5, 3.3)] {
            assert!((f.value(t, x) - f.value(0.0, x - c * t)).abs() < 1e-8);
        }
    }
}

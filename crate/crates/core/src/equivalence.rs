//! Equivalence transformations of the class, the gauge to `α = 0`, and the
//! reducibility test for constant-coefficient form.

use crate::error::{Error, Result};
use crate::exprcalc::expr::{self, Expr, Func};
use crate::exprcalc::{chebyshev_nodes, SmoothFn};
use crate::jet::Jet;

const SAMPLES: usize = 64;

fn sample_points(lo: f64, hi: f64) -> Vec<f64> {
    let mut v = chebyshev_nodes(lo, hi, SAMPLES);
    v.insert(0, lo);
    v.push(hi);
    v
}

/// One member `u_t + u u_x + α(t) u + β(t) u_xxxxx = 0` of the class.
#[derive(Clone, Debug)]
pub struct EquationSpec {
    alpha: SmoothFn,
    beta: SmoothFn,
    a_int: SmoothFn,
    e_neg_a: SmoothFn,
    t_gauge: SmoothFn,
}

impl EquationSpec {
    /// The working interval is taken from `beta`.
    pub fn new(alpha: SmoothFn, beta: SmoothFn) -> Result<Self> {
        let (lo, hi) = beta.interval();
        let alpha = if alpha.interval() == (lo, hi) {
            alpha
        } else {
            alpha.with_interval((lo, hi))
        };
        let sign = beta.value(lo).signum();
        for t in sample_points(lo, hi) {
            let b = beta.value(t);
            if !b.is_finite() || b == 0.0 || b.signum() != sign {
                return Err(Error::Invalid(format!(
                    "beta must be finite and nonzero on [{lo}, {hi}]; beta({t}) = {b}"
                )));
            }
            if !alpha.value(t).is_finite() {
                return Err(Error::Invalid(format!("alpha is not finite at t = {t}")));
            }
        }
        let a_int = alpha.integral();
        let e_neg_a = match a_int.expr() {
            Some(e) => SmoothFn::from_expr(expr::call(Func::Exp, expr::neg(e.clone())), (lo, hi))?,
            None => {
                let a = a_int.clone();
                SmoothFn::from_jet_fn(format!("exp(-{})", a_int.label()), (lo, hi), move |t| {
                    (-a.jet(t)).exp()
                })
            }
        };
        let t_gauge = e_neg_a.integral();
        Ok(EquationSpec {
            alpha,
            beta,
            a_int,
            e_neg_a,
            t_gauge,
        })
    }

    pub fn parse(alpha: &str, beta: &str, interval: (f64, f64)) -> Result<Self> {
        Self::new(
            SmoothFn::parse(alpha, interval)?,
            SmoothFn::parse(beta, interval)?,
        )
    }

    /// `α = 0` member with the given `β`.
    pub fn with_beta(beta: SmoothFn) -> Result<Self> {
        let alpha = SmoothFn::constant(0.0, beta.interval());
        Self::new(alpha, beta)
    }

    pub fn alpha(&self) -> &SmoothFn {
        &self.alpha
    }

    pub fn beta(&self) -> &SmoothFn {
        &self.beta
    }

    pub fn interval(&self) -> (f64, f64) {
        self.beta.interval()
    }

    /// Base point of every quadrature attached to this equation.
    pub fn t_ref(&self) -> f64 {
        self.a_int.t_ref()
    }

    /// `A(t) = ∫ α`.
    pub fn a_integral(&self) -> &SmoothFn {
        &self.a_int
    }

    /// `e^{-A(t)}`.
    pub fn exp_neg_a(&self) -> &SmoothFn {
        &self.e_neg_a
    }

    /// `T(t) = ∫ e^{-A}`, the gauged time.
    pub fn gauge_time(&self) -> &SmoothFn {
        &self.t_gauge
    }

    pub fn is_alpha_zero(&self) -> bool {
        self.alpha.as_constant() == Some(0.0)
    }

    pub fn sample_points(&self) -> Vec<f64> {
        let (lo, hi) = self.interval();
        sample_points(lo, hi)
    }
}

/// Element of the generalized extended equivalence group:
/// `t̃ = T(t)`, `x̃ = (x + δ1) X¹ + δ2`, `ũ = (X¹ u + X¹_t (x + δ1)) / T_t`.
#[derive(Clone, Debug)]
pub struct HatGElement {
    t_map: SmoothFn,
    t_dt: SmoothFn,
    x1: SmoothFn,
    delta: [f64; 4],
    gauge: bool,
    image: (f64, f64),
}

impl HatGElement {
    /// Element with `X¹ = (δ3 ∫e^{-A} + δ4)^{-1}` built from `eq`;
    /// `delta = [δ1, δ2, δ3, δ4]`.
    pub fn new(eq: &EquationSpec, t_map: SmoothFn, delta: [f64; 4]) -> Result<Self> {
        let [_, _, d3, d4] = delta;
        if d3 == 0.0 && d4 == 0.0 {
            return Err(Error::Invalid(
                "(delta3, delta4) must not both vanish".into(),
            ));
        }
        let (lo, hi) = eq.interval();
        let x1 = if d3 == 0.0 {
            SmoothFn::constant(1.0 / d4, (lo, hi))
        } else {
            let tg = eq.gauge_time().clone();
            SmoothFn::from_jet_fn(format!("1/({d3:?}*T + {d4:?})"), (lo, hi), move |t| {
                (tg.jet(t) * d3 + d4).recip()
            })
        };
        Self::from_parts(eq.interval(), t_map, x1, delta, false)
    }

    fn from_parts(
        (lo, hi): (f64, f64),
        t_map: SmoothFn,
        x1: SmoothFn,
        delta: [f64; 4],
        gauge: bool,
    ) -> Result<Self> {
        let t_map = if t_map.interval() == (lo, hi) {
            t_map
        } else {
            t_map.with_interval((lo, hi))
        };
        let t_dt = t_map.derivative_fn();
        let pts = sample_points(lo, hi);
        let sign = t_dt.value(lo).signum();
        for &t in &pts {
            let d = t_dt.value(t);
            if !d.is_finite() || d == 0.0 || d.signum() != sign {
                return Err(Error::Invalid(format!(
                    "time map is not strictly monotone on [{lo}, {hi}] (T_t({t}) = {d})"
                )));
            }
        }
        let x_sign = x1.value(lo).signum();
        for &t in &pts {
            let v = x1.value(t);
            if !v.is_finite() || v == 0.0 || v.signum() != x_sign {
                return Err(Error::Invalid(format!(
                    "X1 has a pole or zero in [{lo}, {hi}] (X1({t}) = {v})"
                )));
            }
        }
        let (ta, tb) = (t_map.value(lo), t_map.value(hi));
        Ok(HatGElement {
            t_map,
            t_dt,
            x1,
            delta,
            gauge,
            image: (ta.min(tb), ta.max(tb)),
        })
    }

    pub fn identity(eq: &EquationSpec) -> Result<Self> {
        let t = SmoothFn::from_expr(Expr::Var, eq.interval())?;
        Self::new(eq, t, [0.0, 0.0, 0.0, 1.0])
    }

    /// `t̂ = ∫e^{-A}`, `x̂ = x`, `û = e^{A} u`; maps `eq` to `α̂ = 0`.
    pub fn gauge(eq: &EquationSpec) -> Result<Self> {
        let x1 = SmoothFn::constant(1.0, eq.interval());
        Self::from_parts(
            eq.interval(),
            eq.gauge_time().clone(),
            x1,
            [0.0, 0.0, 0.0, 1.0],
            true,
        )
    }

    pub fn deltas(&self) -> [f64; 4] {
        self.delta
    }

    pub fn time_map(&self) -> &SmoothFn {
        &self.t_map
    }

    pub fn x1(&self) -> &SmoothFn {
        &self.x1
    }

    pub fn domain(&self) -> (f64, f64) {
        self.t_map.interval()
    }

    /// Image of the working interval under `T`.
    pub fn image(&self) -> (f64, f64) {
        self.image
    }

    pub fn map_time(&self, t: f64) -> f64 {
        self.t_map.value(t)
    }

    pub fn preimage_time(&self, tt: f64) -> Result<f64> {
        self.t_map.inverse_value(tt)
    }

    pub fn map_point(&self, t: f64, x: f64) -> (f64, f64) {
        let [d1, d2, _, _] = self.delta;
        (self.t_map.value(t), (x + d1) * self.x1.value(t) + d2)
    }

    /// Preimage `x` of `x̃` at source time `t`.
    pub fn preimage_x(&self, t: f64, xt: f64) -> f64 {
        let [d1, d2, _, _] = self.delta;
        (xt - d2) / self.x1.value(t) - d1
    }

    /// `(t̃, x̃, ũ)` for a solution value `u` at `(t, x)`.
    pub fn map_solution_value(&self, t: f64, x: f64, u: f64) -> (f64, f64, f64) {
        let [d1, d2, _, _] = self.delta;
        let x1 = self.x1.jet(t);
        let tt = self.t_dt.value(t);
        (
            self.t_map.value(t),
            (x + d1) * x1.value() + d2,
            (x1.value() * u + x1.d1() * (x + d1)) / tt,
        )
    }

    /// Transformed coefficients `(α̃, β̃)` on the image interval.
    pub fn apply_to_coefficients(&self, eq: &EquationSpec) -> Result<EquationSpec> {
        let image = self.image;
        let (t_map, t_dt, x1) = (self.t_map.clone(), self.t_dt.clone(), self.x1.clone());
        let beta = eq.beta().clone();
        let pull = move |tt: f64, f: &dyn Fn(f64, Jet, Jet) -> Jet| -> Jet {
            let Ok(t0) = t_map.inverse_value(tt) else {
                return Jet::constant(f64::NAN);
            };
            let dt = t_dt.jet(t0);
            let inv = dt.integral(tt).invert(t0);
            inv.compose(&f(t0, dt, x1.jet(t0)))
        };
        let pull_b = pull.clone();
        let beta_t =
            SmoothFn::from_jet_fn(format!("beta~[{}]", eq.beta().label()), image, move |tt| {
                pull_b(tt, &|t0, dt, x| x.powi(5) * beta.jet(t0) / dt)
            });
        let alpha_t = if self.gauge {
            SmoothFn::constant(0.0, image)
        } else {
            let alpha = eq.alpha().clone();
            SmoothFn::from_jet_fn(
                format!("alpha~[{}]", eq.alpha().label()),
                image,
                move |tt| {
                    pull(tt, &|t0, dt, x| {
                        (alpha.jet(t0) - x.derivative() * 2.0 / x + dt.derivative() / dt) / dt
                    })
                },
            )
        };
        EquationSpec::new(alpha_t, beta_t)
    }

    /// Inverse element, mapping `target = self.apply_to_coefficients(eq)`
    /// back to `eq`. `(δ3, δ4)` of the inverse are fitted against the
    /// target's gauged time.
    pub fn inverse(&self, target: &EquationSpec) -> Result<Self> {
        let image = self.image;
        let [d1, d2, _, _] = self.delta;
        let (t_map, t_dt) = (self.t_map.clone(), self.t_dt.clone());
        let inv_jet = move |tt: f64| -> Option<(f64, Jet)> {
            let t0 = t_map.inverse_value(tt).ok()?;
            Some((t0, t_dt.jet(t0).integral(tt).invert(t0)))
        };
        let ij = inv_jet.clone();
        let t_inv = SmoothFn::from_jet_fn("T^-1", image, move |tt| match ij(tt) {
            Some((_, j)) => j,
            None => Jet::constant(f64::NAN),
        });
        let x1 = self.x1.clone();
        let x1_inv = SmoothFn::from_jet_fn("1/X1(T^-1)", image, move |tt| match inv_jet(tt) {
            Some((t0, j)) => j.compose(&x1.jet(t0)).recip(),
            None => Jet::constant(f64::NAN),
        });
        // 1/X1' = δ3' Tg~ + δ4'
        let (mut s_tt, mut s_t, mut s_1, mut s_ty, mut s_y) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for t in target.sample_points() {
            let (g, y) = (target.gauge_time().value(t), 1.0 / x1_inv.value(t));
            s_tt += g * g;
            s_t += g;
            s_1 += 1.0;
            s_ty += g * y;
            s_y += y;
        }
        let det = s_tt * s_1 - s_t * s_t;
        let d3 = (s_ty * s_1 - s_t * s_y) / det;
        let d4 = (s_tt * s_y - s_t * s_ty) / det;
        Self::from_parts(image, t_inv, x1_inv, [-d2, -d1, d3, d4], false)
    }
}

/// Element of the usual equivalence group of the `α = 0` subclass,
/// normalized to `Δ = ad − bc = ±1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GZeroElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
}

impl GZeroElement {
    /// Validates `Δ ≠ 0`, `e2 ≠ 0` and rescales the tuple to `|Δ| = 1`.
    pub fn new(a: f64, b: f64, c: f64, d: f64, e0: f64, e1: f64, e2: f64) -> Result<Self> {
        let delta = a * d - b * c;
        if !(delta.is_finite() && delta != 0.0) {
            return Err(Error::Invalid("ad - bc must be nonzero".into()));
        }
        if e2 == 0.0 || !e2.is_finite() {
            return Err(Error::Invalid("e2 must be nonzero".into()));
        }
        let s = 1.0 / delta.abs().sqrt();
        Ok(GZeroElement {
            a: a * s,
            b: b * s,
            c: c * s,
            d: d * s,
            e0: e0 * s,
            e1: e1 * s,
            e2: e2 * s,
        })
    }

    pub fn identity() -> Self {
        GZeroElement {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
            e0: 0.0,
            e1: 0.0,
            e2: 1.0,
        }
    }

    pub fn delta(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Projective action on `(t, x, 1)`.
    fn matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.a, 0.0, self.b],
            [self.e1, self.e2, self.e0],
            [self.c, 0.0, self.d],
        ]
    }

    fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(
            m[0][0], m[0][2], m[2][0], m[2][2], m[1][2], m[1][0], m[1][1],
        )
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        let (p, q) = (self.matrix(), first.matrix());
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| p[i][k] * q[k][j]).sum();
            }
        }
        Self::from_matrix(m)
    }

    pub fn inverse(&self) -> Result<Self> {
        let GZeroElement {
            a,
            b,
            c,
            d,
            e0,
            e1,
            e2,
        } = *self;
        let det = self.delta() * e2;
        // adjugate of the 3×3 matrix
        let m = [
            [d * e2, 0.0, -b * e2],
            [c * e0 - d * e1, a * d - b * c, b * e1 - a * e0],
            [-c * e2, 0.0, a * e2],
        ];
        Self::from_matrix(m.map(|r| r.map(|v| v / det)))
    }

    pub fn map_time(&self, t: f64) -> f64 {
        (self.a * t + self.b) / (self.c * t + self.d)
    }

    pub fn preimage_time(&self, tt: f64) -> f64 {
        (self.d * tt - self.b) / (self.a - self.c * tt)
    }

    /// `(t̃, x̃, ũ)`.
    pub fn map_point(&self, t: f64, x: f64, u: f64) -> (f64, f64, f64) {
        let GZeroElement {
            a,
            b,
            c,
            d,
            e0,
            e1,
            e2,
        } = *self;
        let den = c * t + d;
        (
            (a * t + b) / den,
            (e2 * x + e1 * t + e0) / den,
            (e2 * den * u - e2 * c * x - e0 * c + e1 * d) / self.delta(),
        )
    }

    /// Preimage `x` of `x̃` at source time `t`.
    pub fn preimage_x(&self, t: f64, xt: f64) -> f64 {
        (xt * (self.c * t + self.d) - self.e1 * t - self.e0) / self.e2
    }

    fn check_pole(&self, (lo, hi): (f64, f64)) -> Result<()> {
        let (p, q) = (self.c * lo + self.d, self.c * hi + self.d);
        if p * q <= 0.0 {
            return Err(Error::Invalid(format!("ct + d vanishes on [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// `β̃(t̃) = e2⁵ β / ((ct + d)³ Δ)` for an `α = 0` equation.
    pub fn apply_to_equation(&self, eq: &EquationSpec) -> Result<EquationSpec> {
        if !eq.is_alpha_zero() {
            return Err(Error::Invalid(
                "the usual group acts on alpha = 0 equations; gauge first".into(),
            ));
        }
        let (lo, hi) = eq.interval();
        self.check_pole((lo, hi))?;
        let (ta, tb) = (self.map_time(lo), self.map_time(hi));
        let image = (ta.min(tb), ta.max(tb));
        let GZeroElement { a, b, c, d, e2, .. } = *self;
        let delta = self.delta();
        // ct + d = Δ/(a − c t̃) along the inverse map
        let k = e2.powi(5) / delta.powi(4);
        let symbolic = eq.beta().expr().and_then(|be| {
            let inv = expr::div(
                expr::sub(expr::mul(Expr::Num(d), Expr::Var), Expr::Num(b)),
                expr::sub(Expr::Num(a), expr::mul(Expr::Num(c), Expr::Var)),
            );
            let factor = expr::pow(
                expr::sub(Expr::Num(a), expr::mul(Expr::Num(c), Expr::Var)),
                3.0,
            );
            let e = expr::mul(Expr::Num(k), expr::mul(factor, be.substitute(&inv)));
            SmoothFn::from_expr(e, image).ok()
        });
        let beta_t = match symbolic {
            Some(f) => f,
            None => {
                let beta = eq.beta().clone();
                SmoothFn::from_jet_fn(format!("beta~[{}]", eq.beta().label()), image, move |tt| {
                    let s = Jet::var(tt);
                    let f = -(s * c - a);
                    let inv = (s * d - b) / f;
                    f.powi(3) * beta.at(inv) * k
                })
            }
        };
        EquationSpec::with_beta(beta_t)
    }

    /// The same transformation as an element of the extended group acting on
    /// `eq` (which must have `α = 0`). Pure Galilean components (`c = 0`,
    /// `e1 ≠ 0`) have no such representation.
    pub fn to_hatg(&self, eq: &EquationSpec) -> Result<HatGElement> {
        if !eq.is_alpha_zero() {
            return Err(Error::Invalid("alpha must vanish".into()));
        }
        self.check_pole(eq.interval())?;
        let GZeroElement {
            a,
            b,
            c,
            d,
            e0,
            e1,
            e2,
        } = *self;
        let t_map = SmoothFn::from_expr(
            expr::div(
                expr::add(expr::mul(Expr::Num(a), Expr::Var), Expr::Num(b)),
                expr::add(expr::mul(Expr::Num(c), Expr::Var), Expr::Num(d)),
            ),
            eq.interval(),
        )?;
        let t_ref = eq.t_ref();
        let (d1, d2) = if c == 0.0 {
            if e1 != 0.0 {
                return Err(Error::Unsupported(
                    "Galilean component with c = 0 is not of the extended-group form".into(),
                ));
            }
            (e0 / e2, 0.0)
        } else {
            ((e0 - e1 * d / c) / e2, e1 / c)
        };
        HatGElement::new(eq, t_map, [d1, d2, c / e2, (c * t_ref + d) / e2])
    }
}

/// Outcome of the constant-coefficient reducibility test.
#[derive(Clone, Debug)]
pub struct ReducibilityReport {
    pub reducible: bool,
    /// Least-squares fit `(βe^{A})^{1/3} ≈ c1 T + c2`.
    pub c1: f64,
    pub c2: f64,
    /// Scale-free curvature statistic of `(βe^{A})^{1/3}` against `T`.
    pub residual: f64,
    /// Constant coefficient of the image equation (`NaN` if not reducible).
    pub mu: f64,
    /// `c1 = 0`: the gauge alone reaches constant coefficients.
    pub gauge_suffices: bool,
    pub diagnostic: Option<String>,
}

/// Test whether `β = e^{-A}(c1 T + c2)³` holds on the working interval.
pub fn is_reducible_to_constant(eq: &EquationSpec, tol: f64) -> Result<ReducibilityReport> {
    let (lo, hi) = eq.interval();
    let nodes = chebyshev_nodes(lo, hi, SAMPLES);
    let mut g = Vec::with_capacity(nodes.len());
    let mut big_t = Vec::with_capacity(nodes.len());
    let mut curv: f64 = 0.0;
    let mut sign = 0.0;
    for &t in &nodes {
        let ea = eq.a_integral().jet(t).exp();
        let p = eq.beta().jet(t) * ea;
        if !p.is_finite_to(2) {
            return Err(Error::Numerical(format!(
                "non-finite beta*exp(A) at t = {t}"
            )));
        }
        let s = p.value().signum();
        if sign == 0.0 {
            sign = s;
        } else if s != sign {
            return Ok(ReducibilityReport {
                reducible: false,
                c1: f64::NAN,
                c2: f64::NAN,
                residual: f64::INFINITY,
                mu: f64::NAN,
                gauge_suffices: false,
                diagnostic: Some(format!("beta changes sign near t = {t}")),
            });
        }
        let gj = p.cbrt();
        let h = ea * gj.derivative();
        curv = curv.max((ea * h.derivative()).value().abs());
        g.push(gj.value());
        big_t.push(eq.gauge_time().value(t));
    }
    if big_t.iter().any(|v| !v.is_finite()) {
        return Err(Error::Quadrature("gauged time is not finite".into()));
    }
    let t_range = big_t.iter().cloned().fold(f64::MIN, f64::max)
        - big_t.iter().cloned().fold(f64::MAX, f64::min);
    let g_max = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual = curv / (g_max / (t_range * t_range));
    let (c1, c2) = fit_line(&big_t, &g);
    let reducible = residual <= tol;
    let gauge_suffices = reducible && c1.abs() * t_range <= 1e-9 * g_max;
    let mu = if !reducible {
        f64::NAN
    } else if gauge_suffices {
        c2.powi(3)
    } else {
        1.0
    };
    Ok(ReducibilityReport {
        reducible,
        c1,
        c2,
        residual,
        mu,
        gauge_suffices,
        diagnostic: None,
    })
}

fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Composite map from a reducible equation to constant-coefficient form.
#[derive(Clone, Debug)]
pub struct ConstantChain {
    pub gauge: HatGElement,
    /// Möbius step, absent when the gauge alone suffices.
    pub moebius: Option<GZeroElement>,
    pub mu: f64,
    pub image: EquationSpec,
    /// `max |α̃|` and `max |β̃ − μ|` over the image interval.
    pub alpha_residual: f64,
    pub beta_residual: f64,
}

pub fn map_to_constant(eq: &EquationSpec, tol: f64) -> Result<ConstantChain> {
    let report = is_reducible_to_constant(eq, tol)?;
    if !report.reducible {
        return Err(Error::Invalid(format!(
            "equation is not reducible to constant coefficients (statistic {:e})",
            report.residual
        )));
    }
    let gauge = HatGElement::gauge(eq)?;
    let gauged = gauge.apply_to_coefficients(eq)?;
    let (c1, c2) = (report.c1, report.c2);
    let (moebius, image) = if !report.gauge_suffices {
        let (a, b) = if c2 != 0.0 {
            (1.0 / c2, 0.0)
        } else {
            (0.0, -1.0 / c1)
        };
        let g0 = GZeroElement::new(a, b, c1, c2, 0.0, 0.0, 1.0)?;
        let image = g0.apply_to_equation(&gauged)?;
        (Some(g0), image)
    } else {
        (None, gauged)
    };
    let mu = report.mu;
    let mut alpha_residual: f64 = 0.0;
    let mut beta_residual: f64 = 0.0;
    for t in image.sample_points() {
        alpha_residual = alpha_residual.max(image.alpha().value(t).abs());
        beta_residual = beta_residual.max((image.beta().value(t) - mu).abs());
    }
    Ok(ConstantChain {
        gauge,
        moebius,
        mu,
        image,
        alpha_residual,
        beta_residual,
    })
}

use std::fmt;
use std::sync::{Arc, OnceLock};

use super::expr::{self, Expr};
use super::parse::parse;
use super::quad::integrate;
use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};

type JetFn = dyn Fn(f64) -> Jet + Send + Sync;

const PANELS: usize = 64;

enum Repr {
    Expr {
        e: Expr,
        d1: Expr,
        d2: Expr,
    },
    Custom(Arc<JetFn>),
    /// Antiderivative of another function, anchored at its `t_ref`.
    Integral(SmoothFn),
}

struct Inner {
    repr: Repr,
    label: String,
    lo: f64,
    hi: f64,
    t_ref: f64,
    table: OnceLock<std::result::Result<Table, Error>>,
}

/// Cumulative integrals from `t_ref` at panel nodes.
struct Table {
    nodes: Vec<f64>,
    cum: Vec<f64>,
}

/// Smooth function of `t` on a working interval, with exact derivatives up to
/// fifth order and a cached antiderivative.
#[derive(Clone)]
pub struct SmoothFn {
    inner: Arc<Inner>,
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SmoothFn({} on [{}, {}])",
            self.inner.label, self.inner.lo, self.inner.hi
        )
    }
}

impl fmt::Display for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.inner.label)
    }
}

/// Base point for a closed-form integrand: `t = 0` whenever the integrand
/// stays finite and moderate between 0 and the interval, so that
/// antiderivatives such as `∫1 = t` keep their natural constant.
fn expr_ref(e: &Expr, lo: f64, hi: f64) -> f64 {
    if lo <= 0.0 && 0.0 <= hi {
        return 0.0;
    }
    let bound = (0..=32)
        .map(|i| e.eval(lo + (hi - lo) * i as f64 / 32.0).abs())
        .fold(0.0, f64::max);
    let (a, b) = if hi < 0.0 { (hi, 0.0) } else { (0.0, lo) };
    let ok = (0..=256).all(|i| {
        let v = e.eval(a + (b - a) * i as f64 / 256.0);
        v.is_finite() && v.abs() <= 1e3 * (bound + 1.0)
    });
    if ok {
        0.0
    } else {
        lo
    }
}

fn default_ref(lo: f64, hi: f64) -> f64 {
    if lo <= 0.0 && 0.0 <= hi {
        0.0
    } else {
        lo
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Invalid(format!("bad interval [{lo}, {hi}]")));
    }
    Ok(())
}

impl SmoothFn {
    fn build(repr: Repr, label: String, lo: f64, hi: f64, t_ref: f64) -> Self {
        SmoothFn {
            inner: Arc::new(Inner {
                repr,
                label,
                lo,
                hi,
                t_ref,
                table: OnceLock::new(),
            }),
        }
    }

    /// Parse `text` and check it evaluates to a finite value across the
    /// interval.
    pub fn parse(text: &str, interval: (f64, f64)) -> Result<Self> {
        let e = parse(text)?;
        Self::from_expr(e, interval)
    }

    pub fn from_expr(e: Expr, (lo, hi): (f64, f64)) -> Result<Self> {
        check_interval(lo, hi)?;
        for i in 0..=32 {
            let t = lo + (hi - lo) * i as f64 / 32.0;
            e.try_eval(t)?;
        }
        let d1 = e.diff();
        let d2 = d1.diff();
        let label = e.to_string();
        let t_ref = expr_ref(&e, lo, hi);
        Ok(Self::build(Repr::Expr { e, d1, d2 }, label, lo, hi, t_ref))
    }

    pub fn constant(c: f64, (lo, hi): (f64, f64)) -> Self {
        let e = Expr::Num(c);
        Self::build(
            Repr::Expr {
                e: e.clone(),
                d1: Expr::Num(0.0),
                d2: Expr::Num(0.0),
            },
            e.to_string(),
            lo,
            hi,
            0.0,
        )
    }

    /// Function given by its Taylor expansion at each point.
    pub fn from_jet_fn(
        label: impl Into<String>,
        (lo, hi): (f64, f64),
        f: impl Fn(f64) -> Jet + Send + Sync + 'static,
    ) -> Self {
        Self::build(
            Repr::Custom(Arc::new(f)),
            label.into(),
            lo,
            hi,
            default_ref(lo, hi),
        )
    }

    /// Same function with a different antiderivative anchor.
    pub fn with_t_ref(&self, t_ref: f64) -> Self {
        let repr = match &self.inner.repr {
            Repr::Expr { e, d1, d2 } => Repr::Expr {
                e: e.clone(),
                d1: d1.clone(),
                d2: d2.clone(),
            },
            Repr::Custom(f) => Repr::Custom(f.clone()),
            Repr::Integral(g) => Repr::Integral(g.clone()),
        };
        Self::build(
            repr,
            self.inner.label.clone(),
            self.inner.lo,
            self.inner.hi,
            t_ref,
        )
    }

    /// Same function on a different interval.
    pub fn with_interval(&self, (lo, hi): (f64, f64)) -> Self {
        let f = self.clone();
        match &self.inner.repr {
            Repr::Expr { e, d1, d2 } => Self::build(
                Repr::Expr {
                    e: e.clone(),
                    d1: d1.clone(),
                    d2: d2.clone(),
                },
                self.inner.label.clone(),
                lo,
                hi,
                expr_ref(e, lo, hi),
            ),
            _ => Self::from_jet_fn(self.inner.label.clone(), (lo, hi), move |t| f.jet(t)),
        }
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.inner.lo, self.inner.hi)
    }

    pub fn t_ref(&self) -> f64 {
        self.inner.t_ref
    }

    pub fn expr(&self) -> Option<&Expr> {
        match &self.inner.repr {
            Repr::Expr { e, .. } => Some(e),
            _ => None,
        }
    }

    /// Symbolic first derivative when the function came from an expression.
    pub fn derivative_expr(&self) -> Option<&Expr> {
        match &self.inner.repr {
            Repr::Expr { d1, .. } => Some(d1),
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.expr().and_then(Expr::as_constant)
    }

    /// First derivative as a function in its own right.
    pub fn derivative_fn(&self) -> SmoothFn {
        match &self.inner.repr {
            Repr::Expr { d1, .. } => Self::from_expr(d1.clone(), self.interval())
                .unwrap_or_else(|_| self.jet_derivative()),
            Repr::Integral(g) => g.clone(),
            Repr::Custom(_) => self.jet_derivative(),
        }
    }

    fn jet_derivative(&self) -> SmoothFn {
        let f = self.clone();
        Self::from_jet_fn(format!("d({})", self.label()), self.interval(), move |t| {
            f.jet(t).derivative()
        })
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.inner.repr {
            Repr::Expr { e, .. } => e.eval(t),
            Repr::Custom(f) => f(t).value(),
            Repr::Integral(g) => g.integral_from_ref(t).unwrap_or(f64::NAN),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match &self.inner.repr {
            Repr::Expr { d1, .. } => d1.eval(t),
            Repr::Custom(f) => f(t).d1(),
            Repr::Integral(g) => g.value(t),
        }
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        match &self.inner.repr {
            Repr::Expr { d2, .. } => d2.eval(t),
            Repr::Custom(f) => f(t).d2(),
            Repr::Integral(g) => g.derivative(t),
        }
    }

    /// Taylor expansion at `t` (derivatives through fifth order).
    pub fn jet(&self, t: f64) -> Jet {
        match &self.inner.repr {
            Repr::Expr { e, .. } => e.eval_scalar(Jet::var(t)),
            Repr::Custom(f) => f(t),
            Repr::Integral(g) => {
                let v = g.integral_from_ref(t).unwrap_or(f64::NAN);
                g.jet(t).integral(v)
            }
        }
    }

    /// Solve `f(t) = y` on the working interval for a strictly monotone `f`
    /// (safeguarded Newton).
    pub fn inverse_value(&self, y: f64) -> Result<f64> {
        let (mut a, mut b) = self.interval();
        let (fa, fb) = (self.value(a) - y, self.value(b) - y);
        let scale = 1e-13 * (1.0 + y.abs() + fa.abs().max(fb.abs()));
        if fa.abs() <= scale {
            return Ok(a);
        }
        if fb.abs() <= scale {
            return Ok(b);
        }
        if fa * fb > 0.0 {
            return Err(Error::OutOfInterval {
                t: y,
                lo: self.value(a),
                hi: self.value(b),
            });
        }
        let increasing = fb > 0.0;
        let mut t = a + (b - a) * (-fa) / (fb - fa);
        for _ in 0..200 {
            let j = self.jet(t);
            let r = j.value() - y;
            if r.abs() <= scale {
                return Ok(t);
            }
            if (r > 0.0) == increasing {
                b = t;
            } else {
                a = t;
            }
            let newton = t - r / j.d1();
            t = if newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if b - a <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
                return Ok(t);
            }
        }
        Ok(t)
    }

    /// Evaluate on any scalar type.
    pub fn at<S: Scalar>(&self, t: S) -> S {
        t.apply(&|v| self.jet(v))
    }

    /// `∫_{t_ref}^{t} f`. Errors outside the working interval.
    pub fn antiderivative(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.interval();
        let slack = 1e-12 * (hi - lo).max(1.0);
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::OutOfInterval { t, lo, hi });
        }
        self.integral_from_ref(t)
    }

    /// Antiderivative without the interval check; integrates past the ends
    /// from the nearest cached node.
    pub fn integral_from_ref(&self, t: f64) -> Result<f64> {
        let table = self
            .inner
            .table
            .get_or_init(|| self.build_table())
            .as_ref()
            .map_err(Clone::clone)?;
        let n = &table.nodes;
        let i = match n.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return Ok(table.cum[i]),
            Err(i) => i,
        };
        let k = if i == 0 {
            0
        } else if i >= n.len() || (t - n[i - 1]) <= (n[i] - t) {
            (i - 1).min(n.len() - 1)
        } else {
            i
        };
        let f = |s: f64| self.value(s);
        let rest = integrate(&f, n[k], t, 1e-13 * (1.0 + (t - n[k]).abs()))?;
        Ok(table.cum[k] + rest)
    }

    fn build_table(&self) -> std::result::Result<Table, Error> {
        let (lo, hi) = self.interval();
        let t_ref = self.t_ref();
        let (a, b) = (lo.min(t_ref), hi.max(t_ref));
        let mut nodes: Vec<f64> = (0..=PANELS)
            .map(|i| a + (b - a) * i as f64 / PANELS as f64)
            .collect();
        if !nodes.contains(&t_ref) {
            nodes.push(t_ref);
            nodes.sort_by(f64::total_cmp);
        }
        let f = |s: f64| self.value(s);
        let mut panels = Vec::with_capacity(nodes.len() - 1);
        for w in nodes.windows(2) {
            panels.push(integrate(&f, w[0], w[1], 1e-14 * (1.0 + w[1] - w[0]))?);
        }
        let r = nodes.iter().position(|&x| x == t_ref).unwrap();
        let mut cum = vec![0.0; nodes.len()];
        for i in (r + 1)..nodes.len() {
            cum[i] = cum[i - 1] + panels[i - 1];
        }
        for i in (0..r).rev() {
            cum[i] = cum[i + 1] - panels[i];
        }
        Ok(Table { nodes, cum })
    }

    /// `F(t) = ∫_{t_ref}^{t} f` as a smooth function, closed form when the
    /// integrand is in the symbolic table.
    pub fn integral(&self) -> SmoothFn {
        let (lo, hi) = self.interval();
        let t_ref = self.t_ref();
        if let Some(prim) = self.expr().and_then(Expr::antiderivative) {
            let anchored = expr::sub(prim.clone(), Expr::Num(prim.eval(t_ref)));
            if (lo..=hi).all_finite(&anchored) {
                let d1 = anchored.diff();
                let d2 = d1.diff();
                let label = anchored.to_string();
                return Self::build(
                    Repr::Expr {
                        e: anchored,
                        d1,
                        d2,
                    },
                    label,
                    lo,
                    hi,
                    t_ref,
                );
            }
        }
        Self::build(
            Repr::Integral(self.clone()),
            format!("int({})", self.label()),
            lo,
            hi,
            t_ref,
        )
    }
}

trait AllFinite {
    fn all_finite(&self, e: &Expr) -> bool;
}

impl AllFinite for std::ops::RangeInclusive<f64> {
    fn all_finite(&self, e: &Expr) -> bool {
        let (lo, hi) = (*self.start(), *self.end());
        (0..=32).all(|i| e.eval(lo + (hi - lo) * i as f64 / 32.0).is_finite())
    }
}

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Atan,
    Sqrt,
    Abs,
    /// Sign function; only produced by differentiating `abs`.
    Sign,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Atan => "atan",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "atan" | "arctan" => Func::Atan,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            _ => return None,
        })
    }
}

/// Expression in the single variable `t`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a constant exponent.
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

use Expr::*;

// Smart constructors with light constant folding. They keep derivative trees
// small; they are not a general simplifier.
pub fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Num(x), Num(y)) => Num(x + y),
        (Num(x), _) if *x == 0.0 => b,
        (_, Num(y)) if *y == 0.0 => a,
        _ => Add(Box::new(a), Box::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Num(x), Num(y)) => Num(x - y),
        (_, Num(y)) if *y == 0.0 => a,
        (Num(x), _) if *x == 0.0 => neg(b),
        _ => Sub(Box::new(a), Box::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Num(x), Num(y)) => Num(x * y),
        (Num(x), _) | (_, Num(x)) if *x == 0.0 => Num(0.0),
        (Num(x), _) if *x == 1.0 => b,
        (_, Num(y)) if *y == 1.0 => a,
        (Num(x), _) if *x == -1.0 => neg(b),
        (_, Num(y)) if *y == -1.0 => neg(a),
        _ => Mul(Box::new(a), Box::new(b)),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Num(x), Num(y)) if *y != 0.0 => Num(x / y),
        (Num(x), _) if *x == 0.0 => Num(0.0),
        (_, Num(y)) if *y == 1.0 => a,
        _ => Div(Box::new(a), Box::new(b)),
    }
}

pub fn neg(a: Expr) -> Expr {
    match a {
        Num(x) => Num(-x),
        Neg(inner) => *inner,
        other => Neg(Box::new(other)),
    }
}

pub fn pow(a: Expr, n: f64) -> Expr {
    if n == 0.0 {
        return Num(1.0);
    }
    if n == 1.0 {
        return a;
    }
    match a {
        Num(x) => Num(x.powf(n)),
        other => Pow(Box::new(other), n),
    }
}

pub fn call(f: Func, a: Expr) -> Expr {
    match (&f, &a) {
        (Func::Exp, Num(x)) => Num(x.exp()),
        (Func::Ln, Num(x)) if *x > 0.0 => Num(x.ln()),
        (Func::Sin, Num(x)) => Num(x.sin()),
        (Func::Cos, Num(x)) => Num(x.cos()),
        (Func::Atan, Num(x)) => Num(x.atan()),
        (Func::Sqrt, Num(x)) if *x >= 0.0 => Num(x.sqrt()),
        (Func::Abs, Num(x)) => Num(x.abs()),
        (Func::Sign, Num(x)) => Num(sign(*x)),
        _ => Call(f, Box::new(a)),
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn is_integer(n: f64) -> bool {
    n.fract() == 0.0 && n.abs() <= 64.0
}

impl Expr {
    pub fn contains_var(&self) -> bool {
        match self {
            Num(_) => false,
            Var => true,
            Neg(a) | Pow(a, _) | Call(_, a) => a.contains_var(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.contains_var() || b.contains_var(),
        }
    }

    /// Constant value if the expression does not depend on `t`.
    pub fn as_constant(&self) -> Option<f64> {
        if self.contains_var() {
            None
        } else {
            Some(self.eval(0.0))
        }
    }

    /// Evaluate at `t`. Domain violations yield `NaN`; use [`Expr::try_eval`]
    /// for a diagnostic.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_scalar(t)
    }

    pub fn try_eval(&self, t: f64) -> Result<f64> {
        let v = match self {
            Num(x) => *x,
            Var => t,
            Neg(a) => -a.try_eval(t)?,
            Add(a, b) => a.try_eval(t)? + b.try_eval(t)?,
            Sub(a, b) => a.try_eval(t)? - b.try_eval(t)?,
            Mul(a, b) => a.try_eval(t)? * b.try_eval(t)?,
            Div(a, b) => {
                let d = b.try_eval(t)?;
                if d == 0.0 {
                    return Err(Error::Domain(format!("division by zero at t = {t}")));
                }
                a.try_eval(t)? / d
            }
            Pow(a, n) => {
                let base = a.try_eval(t)?;
                if is_integer(*n) {
                    if base == 0.0 && *n < 0.0 {
                        return Err(Error::Domain(format!("0^{n} at t = {t}")));
                    }
                    base.powi(*n as i32)
                } else {
                    if base < 0.0 {
                        return Err(Error::Domain(format!(
                            "non-integer power {n} of negative base {base} at t = {t}"
                        )));
                    }
                    base.powf(*n)
                }
            }
            Call(f, a) => {
                let x = a.try_eval(t)?;
                match f {
                    Func::Ln if x <= 0.0 => {
                        return Err(Error::Domain(format!("ln({x}) at t = {t}")))
                    }
                    Func::Sqrt if x < 0.0 => {
                        return Err(Error::Domain(format!("sqrt({x}) at t = {t}")))
                    }
                    _ => apply_f64(*f, x),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("non-finite value at t = {t}")))
        }
    }

    /// Generic evaluation; with [`Jet`] this yields exact derivatives.
    pub fn eval_scalar<S: Scalar>(&self, t: S) -> S {
        match self {
            Num(x) => S::cst(*x),
            Var => t,
            Neg(a) => -a.eval_scalar(t),
            Add(a, b) => a.eval_scalar(t) + b.eval_scalar(t),
            Sub(a, b) => a.eval_scalar(t) - b.eval_scalar(t),
            Mul(a, b) => a.eval_scalar(t) * b.eval_scalar(t),
            Div(a, b) => a.eval_scalar(t) / b.eval_scalar(t),
            Pow(a, n) => a.eval_scalar(t).powf(*n),
            Call(f, a) => {
                let x = a.eval_scalar(t);
                match f {
                    Func::Exp => x.exp(),
                    Func::Ln => x.ln(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Atan => x.atan(),
                    Func::Sqrt => x.sqrt(),
                    Func::Abs => x.apply(&|v| Jet::var(v).abs()),
                    Func::Sign => x.apply(&|v| Jet::var(v).signum()),
                }
            }
        }
    }

    /// Exact derivative with respect to `t`.
    pub fn diff(&self) -> Expr {
        match self {
            Num(_) => Num(0.0),
            Var => Num(1.0),
            Neg(a) => neg(a.diff()),
            Add(a, b) => add(a.diff(), b.diff()),
            Sub(a, b) => sub(a.diff(), b.diff()),
            Mul(a, b) => add(mul(a.diff(), (**b).clone()), mul((**a).clone(), b.diff())),
            Div(a, b) => div(
                sub(mul(a.diff(), (**b).clone()), mul((**a).clone(), b.diff())),
                pow((**b).clone(), 2.0),
            ),
            Pow(a, n) => mul(mul(Num(*n), pow((**a).clone(), n - 1.0)), a.diff()),
            Call(f, a) => {
                let inner = (**a).clone();
                let outer = match f {
                    Func::Exp => call(Func::Exp, inner),
                    Func::Ln => div(Num(1.0), inner),
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                    Func::Atan => div(Num(1.0), add(Num(1.0), pow(inner, 2.0))),
                    Func::Sqrt => div(Num(0.5), call(Func::Sqrt, inner)),
                    // abs'(0) = sign(0) = 0
                    Func::Abs => call(Func::Sign, inner),
                    Func::Sign => Num(0.0),
                };
                mul(outer, a.diff())
            }
        }
    }

    /// Replace every occurrence of `t` by `r`.
    pub fn substitute(&self, r: &Expr) -> Expr {
        match self {
            Num(x) => Num(*x),
            Var => r.clone(),
            Neg(a) => neg(a.substitute(r)),
            Add(a, b) => add(a.substitute(r), b.substitute(r)),
            Sub(a, b) => sub(a.substitute(r), b.substitute(r)),
            Mul(a, b) => mul(a.substitute(r), b.substitute(r)),
            Div(a, b) => div(a.substitute(r), b.substitute(r)),
            Pow(a, n) => pow(a.substitute(r), *n),
            Call(f, a) => call(*f, a.substitute(r)),
        }
    }

    /// `(slope, intercept)` if the expression is affine in `t`.
    pub fn as_affine(&self) -> Option<(f64, f64)> {
        match self {
            Num(x) => Some((0.0, *x)),
            Var => Some((1.0, 0.0)),
            Neg(a) => a.as_affine().map(|(s, c)| (-s, -c)),
            Add(a, b) => {
                let (s1, c1) = a.as_affine()?;
                let (s2, c2) = b.as_affine()?;
                Some((s1 + s2, c1 + c2))
            }
            Sub(a, b) => {
                let (s1, c1) = a.as_affine()?;
                let (s2, c2) = b.as_affine()?;
                Some((s1 - s2, c1 - c2))
            }
            Mul(a, b) => match (a.as_constant(), b.as_constant()) {
                (Some(k), _) => b.as_affine().map(|(s, c)| (k * s, k * c)),
                (_, Some(k)) => a.as_affine().map(|(s, c)| (k * s, k * c)),
                _ => None,
            },
            Div(a, b) => {
                let k = b.as_constant()?;
                a.as_affine().map(|(s, c)| (s / k, c / k))
            }
            _ => self.as_constant().map(|c| (0.0, c)),
        }
    }

    /// Closed-form antiderivative from a small table (polynomial terms,
    /// `1/t`, and `exp`/`sin`/`cos` of affine arguments). `None` when the
    /// table does not apply; callers then fall back to quadrature.
    pub fn antiderivative(&self) -> Option<Expr> {
        if let Some(c) = self.as_constant() {
            return Some(mul(Num(c), Var));
        }
        match self {
            Var => Some(div(pow(Var, 2.0), Num(2.0))),
            Neg(a) => a.antiderivative().map(neg),
            Add(a, b) => Some(add(a.antiderivative()?, b.antiderivative()?)),
            Sub(a, b) => Some(sub(a.antiderivative()?, b.antiderivative()?)),
            Mul(a, b) => match (a.as_constant(), b.as_constant()) {
                (Some(k), _) => b.antiderivative().map(|f| mul(Num(k), f)),
                (_, Some(k)) => a.antiderivative().map(|f| mul(Num(k), f)),
                _ => None,
            },
            Div(a, b) => {
                if let Some(k) = b.as_constant() {
                    return a.antiderivative().map(|f| div(f, Num(k)));
                }
                match (a.as_constant(), b.as_affine()) {
                    (Some(k), Some((s, _))) if s != 0.0 => Some(mul(
                        Num(k / s),
                        call(Func::Ln, call(Func::Abs, (**b).clone())),
                    )),
                    _ => None,
                }
            }
            Pow(a, n) => {
                let (s, _) = a.as_affine()?;
                if s == 0.0 {
                    return None;
                }
                if *n == -1.0 {
                    Some(div(call(Func::Ln, call(Func::Abs, (**a).clone())), Num(s)))
                } else {
                    Some(div(pow((**a).clone(), n + 1.0), Num(s * (n + 1.0))))
                }
            }
            Call(f, a) => {
                let (s, _) = a.as_affine()?;
                if s == 0.0 {
                    return None;
                }
                let inner = (**a).clone();
                match f {
                    Func::Exp => Some(div(call(Func::Exp, inner), Num(s))),
                    Func::Sin => Some(div(neg(call(Func::Cos, inner)), Num(s))),
                    Func::Cos => Some(div(call(Func::Sin, inner), Num(s))),
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

fn apply_f64(f: Func, x: f64) -> f64 {
    match f {
        Func::Exp => x.exp(),
        Func::Ln => x.ln(),
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Atan => x.atan(),
        Func::Sqrt => x.sqrt(),
        Func::Abs => x.abs(),
        Func::Sign => sign(x),
    }
}

fn fmt_num(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x < 0.0 || (x == 0.0 && x.is_sign_negative()) {
        write!(f, "({x:?})")
    } else {
        write!(f, "{x:?}")
    }
}

/// Fully parenthesised output that parses back to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num(x) => fmt_num(f, *x),
            Var => write!(f, "t"),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Pow(a, n) => {
                write!(f, "({a}^")?;
                fmt_num(f, *n)?;
                write!(f, ")")
            }
            Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

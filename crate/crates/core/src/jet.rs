//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] carries the Taylor coefficients `f^(k)(t0) / k!` for
//! `k = 0..=DEGREE` of a function around a point. Arithmetic on jets is
//! forward-mode automatic differentiation to fifth order, which is exactly
//! what the fifth-order equations in this crate need.
//!
//! Coefficients that are not known (for instance the top coefficient after a
//! differentiation) are stored as `NaN`. A `NaN` in coefficient `k` only
//! contaminates coefficients `>= k` of any result, so lower orders stay exact.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest Taylor degree carried by a [`Jet`].
pub const DEGREE: usize = 5;
pub const LEN: usize = DEGREE + 1;

const FACT: [f64; LEN] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; LEN],
}

impl Jet {
    pub const fn from_coeffs(c: [f64; LEN]) -> Self {
        Jet { c }
    }

    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c }
    }

    /// The independent variable expanded around `t0`.
    pub fn var(t0: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = t0;
        c[1] = 1.0;
        Jet { c }
    }

    /// Build a jet from derivative values `f, f', f'', ...` (missing orders
    /// are marked unknown).
    pub fn from_derivatives(d: &[f64]) -> Self {
        let mut c = [f64::NAN; LEN];
        for (k, v) in d.iter().take(LEN).enumerate() {
            c[k] = v / FACT[k];
        }
        Jet { c }
    }

    pub fn coeffs(&self) -> &[f64; LEN] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `n`-th derivative at the expansion point.
    pub fn d(&self, n: usize) -> f64 {
        self.c[n] * FACT[n]
    }

    pub fn d1(&self) -> f64 {
        self.c[1]
    }

    pub fn d2(&self) -> f64 {
        self.c[2] * 2.0
    }

    pub fn is_finite_to(&self, order: usize) -> bool {
        self.c[..=order.min(DEGREE)].iter().all(|v| v.is_finite())
    }

    /// Derivative of the expansion; the top coefficient becomes unknown.
    pub fn derivative(&self) -> Self {
        let mut c = [f64::NAN; LEN];
        for k in 0..DEGREE {
            c[k] = (k + 1) as f64 * self.c[k + 1];
        }
        Jet { c }
    }

    /// Antiderivative expansion whose value at the expansion point is `value`.
    pub fn integral(&self, value: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = value;
        for k in 1..LEN {
            c[k] = self.c[k - 1] / k as f64;
        }
        Jet { c }
    }

    /// Evaluate the Taylor polynomial at offset `h` from the expansion point.
    pub fn eval_offset(&self, h: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &ck| acc * h + ck)
    }

    /// `outer ∘ self`, where `outer` is the expansion of some function around
    /// `self.value()`.
    pub fn compose(&self, outer: &Jet) -> Self {
        let mut delta = *self;
        delta.c[0] = 0.0;
        let mut acc = Jet::constant(outer.c[0]);
        let mut pow = delta;
        for k in 1..LEN {
            acc.add_scaled_from(&pow, outer.c[k], k);
            pow = pow * delta;
        }
        acc
    }

    /// `self += s * p` on degrees `>= from`; `p` vanishes below `from`, so an
    /// unknown `s` must not spoil the lower coefficients.
    fn add_scaled_from(&mut self, p: &Jet, s: f64, from: usize) {
        for j in from..LEN {
            self.c[j] += s * p.c[j];
        }
    }

    /// Series reversion: if `self` expands `T` around `t0`, returns the
    /// expansion of `T^{-1}` around `T(t0)`, with value `t0`.
    pub fn invert(&self, t0: f64) -> Self {
        let t1 = self.c[1];
        let mut delta = Jet::from_coeffs([0.0, 1.0 / t1, 0.0, 0.0, 0.0, 0.0]);
        let eps = Jet::from_coeffs([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        for _ in 0..DEGREE {
            let mut higher = Jet::constant(0.0);
            let mut pow = delta * delta;
            for k in 2..LEN {
                higher.add_scaled_from(&pow, self.c[k], k);
                pow = pow * delta;
            }
            delta = (eps - higher) / t1;
            delta.c[0] = 0.0;
        }
        delta + t0
    }

    pub fn recip(&self) -> Self {
        Jet::constant(1.0) / *self
    }

    pub fn exp(&self) -> Self {
        let mut e = [0.0; LEN];
        e[0] = self.c[0].exp();
        for k in 1..LEN {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Jet { c: e }
    }

    pub fn ln(&self) -> Self {
        let a0 = self.c[0];
        let mut l = [0.0; LEN];
        l[0] = a0.ln();
        for k in 1..LEN {
            let mut s = 0.0;
            for j in 1..k {
                s += j as f64 * l[j] * self.c[k - j];
            }
            l[k] = (self.c[k] - s / k as f64) / a0;
        }
        Jet { c: l }
    }

    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = *self;
        let mut acc = Jet::constant(1.0);
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn powf(&self, r: f64) -> Self {
        if r.fract() == 0.0 && r.abs() <= 64.0 {
            return self.powi(r as i32);
        }
        let a0 = self.c[0];
        let mut p = [0.0; LEN];
        p[0] = a0.powf(r);
        for k in 1..LEN {
            let mut s = 0.0;
            for j in 1..=k {
                s += ((r + 1.0) * j as f64 - k as f64) * self.c[j] * p[k - j];
            }
            p[k] = s / (k as f64 * a0);
        }
        Jet { c: p }
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    /// Real (sign-carrying) cube root.
    pub fn cbrt(&self) -> Self {
        if self.c[0] < 0.0 {
            -(-*self).powf(1.0 / 3.0)
        } else {
            self.powf(1.0 / 3.0)
        }
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let mut s = [0.0; LEN];
        let mut c = [0.0; LEN];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..LEN {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * self.c[j] * c[k - j];
                cc += j as f64 * self.c[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn atan(&self) -> Self {
        let d = self.derivative();
        let b = d / (*self * *self + 1.0);
        b.integral(self.c[0].atan())
    }

    pub fn abs(&self) -> Self {
        if self.c[0] < 0.0 {
            -*self
        } else {
            *self
        }
    }

    pub fn signum(&self) -> Self {
        let s = if self.c[0] > 0.0 {
            1.0
        } else if self.c[0] < 0.0 {
            -1.0
        } else {
            0.0
        };
        Jet::constant(s)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a += b;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a -= b;
        }
        Jet { c }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for k in 0..LEN {
            let mut s = 0.0;
            for j in 0..=k {
                s += self.c[j] * o.c[k - j];
            }
            c[k] = s;
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let mut q = [0.0; LEN];
        let b0 = o.c[0];
        for k in 0..LEN {
            let mut s = self.c[k];
            for j in 1..=k {
                s -= o.c[j] * q[k - j];
            }
            q[k] = s / b0;
        }
        Jet { c: q }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            c: self.c.map(|v| -v),
        }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, o: f64) -> Jet {
        self.c[0] += o;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, o: f64) -> Jet {
        self.c[0] -= o;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, o: f64) -> Jet {
        Jet {
            c: self.c.map(|v| v * o),
        }
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, o: f64) -> Jet {
        Jet {
            c: self.c.map(|v| v / o),
        }
    }
}

/// Numeric type usable by closed-form fields: plain `f64` for values, [`Jet`]
/// for exact derivatives.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn val(&self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powf(self, r: f64) -> Self;
    fn sqrt(self) -> Self;
    fn atan(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    /// Apply a function known through its expansion at any point.
    fn apply(self, f: &dyn Fn(f64) -> Jet) -> Self;
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn val(&self) -> f64 {
        *self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn powf(self, r: f64) -> Self {
        if r.fract() == 0.0 && r.abs() <= 64.0 {
            self.powi(r as i32)
        } else {
            f64::powf(self, r)
        }
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn apply(self, f: &dyn Fn(f64) -> Jet) -> Self {
        f(self).value()
    }
}

impl Scalar for Jet {
    fn cst(v: f64) -> Self {
        Jet::constant(v)
    }
    fn val(&self) -> f64 {
        self.value()
    }
    fn exp(self) -> Self {
        Jet::exp(&self)
    }
    fn ln(self) -> Self {
        Jet::ln(&self)
    }
    fn powf(self, r: f64) -> Self {
        Jet::powf(&self, r)
    }
    fn sqrt(self) -> Self {
        Jet::sqrt(&self)
    }
    fn atan(self) -> Self {
        Jet::atan(&self)
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    fn apply(self, f: &dyn Fn(f64) -> Jet) -> Self {
        self.compose(&f(self.value()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn exp_of_linear_has_factorial_coefficients() {
        let x = Jet::var(0.0);
        let e = x.exp();
        for k in 0..=DEGREE {
            assert!(close(e.d(k), 1.0, 1e-14));
        }
    }

    #[test]
    fn derivatives_of_composite_match_closed_form() {
        // f(t) = sin(t^2) at t = 0.7
        let t = Jet::var(0.7);
        let f = (t * t).sin_cos().0;
        let t0: f64 = 0.7;
        let d1 = 2.0 * t0 * (t0 * t0).cos();
        let d2 = 2.0 * (t0 * t0).cos() - 4.0 * t0 * t0 * (t0 * t0).sin();
        assert!(close(f.d1(), d1, 1e-14));
        assert!(close(f.d2(), d2, 1e-14));
    }

    #[test]
    fn atan_and_ln_derivatives() {
        let t = Jet::var(2.0);
        assert!(close(t.atan().d1(), 1.0 / 5.0, 1e-14));
        assert!(close(t.atan().d2(), -4.0 / 25.0, 1e-14));
        assert!(close(t.ln().d(3), 2.0 / 8.0, 1e-14));
        assert!(close(t.powf(1.5).d2(), 0.75 / 2f64.sqrt(), 1e-14));
    }

    #[test]
    fn inversion_round_trips() {
        let t0 = 0.4;
        let tj = Jet::var(t0);
        let big_t = (tj * 0.5).exp() + tj * tj;
        let inv = big_t.invert(t0);
        let back = inv.compose(&big_t);
        assert!(close(back.value(), big_t.value(), 1e-14));
        assert!(close(back.d1(), 1.0, 1e-12));
        for k in 2..=DEGREE {
            assert!(back.d(k).abs() < 1e-9, "order {k}: {}", back.d(k));
        }
    }

    #[test]
    fn derivative_marks_top_unknown() {
        let d = Jet::var(1.0).exp().derivative();
        assert!(d.is_finite_to(DEGREE - 1));
        assert!(d.coeffs()[DEGREE].is_nan());
    }
}

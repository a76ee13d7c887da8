//! Pushing a solution along the flow of a point symmetry.

use crate::equivalence::EquationSpec;
use crate::jet::{Jet, LEN};
use crate::pdesolve::{pointwise_residual, SmoothField};

use super::field::{AffineField, AffineJets};

/// How the one-parameter group `exp(εQ)` is approximated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowScheme {
    /// One explicit Euler step each way: first order in `ε`.
    Euler,
    /// Classical RK4 with `steps` substeps each way.
    Rk4 { steps: usize },
}

/// `ũ = exp(εQ)·u`, evaluated at any `(t, x)` by flowing the point back
/// to `(t0, x0)`, reading `u` there and carrying `u` forward.
pub struct FlowedField<'a> {
    base: &'a dyn SmoothField,
    field: AffineField,
    eps: f64,
    scheme: FlowScheme,
}

pub fn push_solution<'a>(
    base: &'a dyn SmoothField,
    field: &AffineField,
    eps: f64,
    scheme: FlowScheme,
) -> FlowedField<'a> {
    FlowedField {
        base,
        field: field.clone(),
        eps,
        scheme,
    }
}

fn coeffs_at(field: &AffineField, t: Jet) -> AffineJets {
    let c = field.jets(t.value());
    AffineJets {
        tau: t.compose(&c.tau),
        xi1: t.compose(&c.xi1),
        xi0: t.compose(&c.xi0),
        eta_u: t.compose(&c.eta_u),
        eta_x: t.compose(&c.eta_x),
        eta0: t.compose(&c.eta0),
    }
}

type Point = (Jet, Jet, Jet);

impl FlowedField<'_> {
    fn rate(&self, p: Point) -> Point {
        let c = coeffs_at(&self.field, p.0);
        (
            c.tau,
            c.xi1 * p.1 + c.xi0,
            c.eta_u * p.2 + c.eta_x * p.1 + c.eta0,
        )
    }

    /// Move `p` by `s` along the field. Only `(t, x)` matter on the way
    /// back, but carrying `u` along costs little.
    fn advance(&self, p: Point, s: f64) -> Point {
        let add = |a: Point, b: Point, h: f64| (a.0 + b.0 * h, a.1 + b.1 * h, a.2 + b.2 * h);
        match self.scheme {
            FlowScheme::Euler => add(p, self.rate(p), s),
            FlowScheme::Rk4 { steps } => {
                let n = steps.max(1);
                let h = s / n as f64;
                let mut p = p;
                for _ in 0..n {
                    let k1 = self.rate(p);
                    let k2 = self.rate(add(p, k1, 0.5 * h));
                    let k3 = self.rate(add(p, k2, 0.5 * h));
                    let k4 = self.rate(add(p, k3, h));
                    p = (
                        p.0 + (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * (h / 6.0),
                        p.1 + (k1.1 + (k2.1 + k3.1) * 2.0 + k4.1) * (h / 6.0),
                        p.2 + (k1.2 + (k2.2 + k3.2) * 2.0 + k4.2) * (h / 6.0),
                    );
                }
                p
            }
        }
    }

    /// `u` at a jet point through the base field. Only the first order is
    /// known when the jet variable moves `t`.
    fn base_at(&self, t: Jet, x: Jet) -> Jet {
        let d = self.base.x_derivatives(t.value(), x.value());
        let mut taylor = [0.0; LEN];
        let mut fact = 1.0;
        for (k, slot) in taylor.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *slot = d[k] / fact;
        }
        let u = x.compose(&Jet::from_coeffs(taylor));
        if t.d1() == 0.0 {
            return u;
        }
        let mut c = *u.coeffs();
        c[1] += self.base.t_derivative(t.value(), x.value()) * t.d1();
        c[2..].iter_mut().for_each(|v| *v = f64::NAN);
        Jet::from_coeffs(c)
    }

    fn transformed(&self, t: Jet, x: Jet) -> Jet {
        let zero = Jet::constant(0.0);
        let (t0, x0, _) = self.advance((t, x, zero), -self.eps);
        let u0 = self.base_at(t0, x0);
        self.advance((t0, x0, u0), self.eps).2
    }
}

impl SmoothField for FlowedField<'_> {
    fn x_derivatives(&self, t: f64, x: f64) -> [f64; 6] {
        let u = self.transformed(Jet::constant(t), Jet::var(x));
        std::array::from_fn(|k| u.d(k))
    }

    fn t_derivative(&self, t: f64, x: f64) -> f64 {
        self.transformed(Jet::var(t), Jet::constant(x)).d1()
    }
}

/// Residuals before and after a push, on the same sample points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowReport {
    pub eps: f64,
    /// Max residual of the base field.
    pub pre: f64,
    /// Max residual of the pushed field.
    pub post: f64,
    /// Max pointwise `|R(ũ) − R(u)|`.
    pub excess: f64,
}

/// Push `u` along `q` by `eps` and compare residuals on `times × xs`.
/// With [`FlowScheme::Rk4`] the push is exact up to the substep error, so
/// `post` stays at the level of `pre`; with [`FlowScheme::Euler`] the
/// excess grows like `eps²`.
pub fn verify_invariance_by_flow(
    q: &AffineField,
    eq: &EquationSpec,
    u: &dyn SmoothField,
    eps: f64,
    scheme: FlowScheme,
    times: &[f64],
    xs: &[f64],
) -> FlowReport {
    let pushed = push_solution(u, q, eps, scheme);
    let mut rep = FlowReport {
        eps,
        pre: 0.0,
        post: 0.0,
        excess: 0.0,
    };
    let finite = |r: f64| {
        if r.is_finite() {
            r.abs()
        } else {
            f64::INFINITY
        }
    };
    for &t in times {
        for &x in xs {
            let a = pointwise_residual(u, eq, t, x);
            let b = pointwise_residual(&pushed, eq, t, x);
            rep.pre = rep.pre.max(finite(a));
            rep.post = rep.post.max(finite(b));
            rep.excess = rep.excess.max(finite(b - a));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::EquationSpec;
    use crate::exactsol::{cn4_field, Cn4Params};
    use crate::exprcalc::SmoothFn;
    use crate::pdesolve::max_pointwise_residual;
    use crate::symmetry::Generator;

    fn slope(eps: &[f64], err: &[f64]) -> f64 {
        let n = eps.len() as f64;
        let (lx, ly): (Vec<f64>, Vec<f64>) =
            eps.iter().zip(err).map(|(e, r)| (e.ln(), r.ln())).unzip();
        let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
        let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
        num / den
    }

    #[test]
    fn scaling_flow_of_cn4() {
        // β = 1 solution; scaling generator 5t∂t + x∂x − 4u∂u.
        let alpha = SmoothFn::constant(0.0, (0.5, 2.0));
        let f = cn4_field(Cn4Params::new(alpha, 0.2, 0.0, 0.0, 0.0, -1.0).unwrap()).unwrap();
        let eq = f.equation().clone();
        let q = Generator::new([0.0, 5.0, 0.0, 1.0, 0.0, 0.0]).to_field();
        let times = [1.0, 1.3];
        let xs: Vec<f64> = (0..17).map(|i| -4.0 + 0.5 * i as f64).collect();
        let pre = max_pointwise_residual(&f, &eq, &times, &xs);
        assert!(pre < 1e-10, "{pre}");
        let exact = push_solution(&f, &q, 0.01, FlowScheme::Rk4 { steps: 4 });
        assert!(max_pointwise_residual(&exact, &eq, &times, &xs) < 1e-10);
        let eps = [0.005, 0.01, 0.02, 0.04];
        let excess: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let g = push_solution(&f, &q, e, FlowScheme::Euler);
                max_pointwise_residual(&g, &eq, &times, &xs)
            })
            .collect();
        let s = slope(&eps, &excess);
        assert!((s - 2.0).abs() < 0.3, "{s} {excess:?}");
    }

    #[test]
    fn affine_solution_is_mapped_to_a_solution() {
        // u = x/(t+1) solves every member of the class; push it along ∂t + x∂x.
        struct Affine;
        impl SmoothField for Affine {
            fn x_derivatives(&self, t: f64, x: f64) -> [f64; 6] {
                [x / (t + 1.0), 1.0 / (t + 1.0), 0.0, 0.0, 0.0, 0.0]
            }
            fn t_derivative(&self, t: f64, x: f64) -> f64 {
                -x / (t + 1.0).powi(2)
            }
        }
        let eq = EquationSpec::parse("0", "exp(t)", (0.0, 2.0)).unwrap();
        let q = Generator::new([5.0, 0.0, 0.0, 1.0, 0.0, 0.0]).to_field();
        let g = push_solution(&Affine, &q, 0.05, FlowScheme::Rk4 { steps: 8 });
        let r = max_pointwise_residual(&g, &eq, &[0.5, 1.0], &[-1.0, 0.0, 2.0]);
        assert!(r < 1e-9, "{r}");
        // Exact image: e^{ε}(x e^{−ε})/(t − 5ε + 1).
        let want = 2.0 / (1.0 - 0.25 + 1.0);
        assert!((g.value(1.0, 2.0) - want).abs() < 1e-9);
    }
}

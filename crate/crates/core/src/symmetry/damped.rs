use crate::equivalence::EquationSpec;
use crate::exprcalc::SmoothFn;
use crate::jet::Jet;

use super::{kernel_algebra, AffineField, AffineJets, Generator};

/// Families of `β` with a nontrivial extension for arbitrary `α`, written in
/// the gauged time `T = ∫e^{-A}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DampedCase {
    /// `β = λT_t (aT+b)^ρ (cT+d)^{3−ρ}`.
    Power {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        rho: f64,
    },
    /// `β = λT_t (cT+d)³ exp((aT+b)/(cT+d))`.
    Exponential { a: f64, b: f64, c: f64, d: f64 },
    /// `β = λT_t e^{5ν arctan((aT+b)/(cT+d))} ((aT+b)²+(cT+d)²)^{3/2}`.
    Arctan {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        nu: f64,
    },
    /// `β = λT_t`.
    Constant,
    /// `β = λT_t (cT+d)³`.
    Cubic { c: f64, d: f64 },
}

struct Gauge {
    t: Jet,
    tt: Jet,
    alpha: Jet,
}

fn gauge_jets(eq: &EquationSpec, t: f64) -> Gauge {
    Gauge {
        t: eq.gauge_time().jet(t),
        tt: eq.exp_neg_a().jet(t),
        alpha: eq.alpha().jet(t),
    }
}

fn zero() -> Jet {
    Jet::constant(0.0)
}

fn field(tau: Jet, xi1: Jet, eta_u: Jet, eta_x: Jet) -> AffineJets {
    AffineJets {
        tau,
        xi1,
        xi0: zero(),
        eta_u,
        eta_x,
        eta0: zero(),
    }
}

impl DampedCase {
    /// The `β` of this family for the given `α` (carried by `eq`).
    pub fn beta(&self, eq: &EquationSpec, lambda: f64) -> SmoothFn {
        let case = *self;
        let g_eq = eq.clone();
        SmoothFn::from_jet_fn(format!("{case:?}"), eq.interval(), move |t| {
            let g = gauge_jets(&g_eq, t);
            let shape = match case {
                DampedCase::Power { a, b, c, d, rho } => {
                    (g.t * a + b).powf(rho) * (g.t * c + d).powf(3.0 - rho)
                }
                DampedCase::Exponential { a, b, c, d } => {
                    let den = g.t * c + d;
                    den.powi(3) * ((g.t * a + b) / den).exp()
                }
                DampedCase::Arctan { a, b, c, d, nu } => {
                    let (p, q) = (g.t * a + b, g.t * c + d);
                    let h2 = p * p + q * q;
                    ((p / q).atan() * (5.0 * nu)).exp() * h2.powf(1.5)
                }
                DampedCase::Constant => Jet::constant(1.0),
                DampedCase::Cubic { c, d } => (g.t * c + d).powi(3),
            };
            g.tt * shape * lambda
        })
    }

    /// Extension operators of the family in the original variables.
    pub fn operators(&self, eq: &EquationSpec) -> Vec<AffineField> {
        damped_closed_form(eq, *self)
    }
}

/// Closed-form extension operators of `case` for the equation `eq`.
pub fn damped_closed_form(eq: &EquationSpec, case: DampedCase) -> Vec<AffineField> {
    let mk = |label: String, f: Box<dyn Fn(&Gauge) -> AffineJets + Send + Sync>| {
        let eq = eq.clone();
        AffineField::new(label, move |t| f(&gauge_jets(&eq, t)))
    };
    match case {
        DampedCase::Power { a, b, c, d, rho } => vec![mk(
            format!("power(rho={rho})"),
            Box::new(move |g| {
                let inv = g.tt.recip();
                let pq = (g.t * a + b) * (g.t * c + d);
                let lin = g.t * (5.0 * a * c);
                field(
                    inv * pq * 5.0,
                    lin + a * d * (rho + 1.0) + b * c * (4.0 - rho),
                    -(lin + g.alpha * inv * pq * 5.0 + b * c * (rho + 1.0) + a * d * (4.0 - rho)),
                    g.tt * (5.0 * a * c),
                )
            }),
        )],
        DampedCase::Exponential { a, b, c, d } => {
            let delta = a * d - b * c;
            vec![mk(
                "exponential".into(),
                Box::new(move |g| {
                    let inv = g.tt.recip();
                    let q = g.t * c + d;
                    field(
                        inv * q * q * 5.0,
                        q * (5.0 * c) + delta,
                        -(q * (g.alpha * q * inv + c) * 5.0) + delta,
                        g.tt * (5.0 * c * c),
                    )
                }),
            )]
        }
        DampedCase::Arctan { a, b, c, d, nu } => {
            let delta = a * d - b * c;
            vec![mk(
                format!("arctan(nu={nu})"),
                Box::new(move |g| {
                    let inv = g.tt.recip();
                    let (p, q) = (g.t * a + b, g.t * c + d);
                    let h2 = p * p + q * q;
                    let lin = p * a + q * c;
                    field(
                        inv * h2,
                        lin + nu * delta,
                        -(lin - nu * delta + g.alpha * inv * h2),
                        g.tt * (a * a + c * c),
                    )
                }),
            )]
        }
        DampedCase::Constant => vec![
            mk(
                "time".into(),
                Box::new(|g| {
                    let inv = g.tt.recip();
                    field(inv, zero(), -(g.alpha * inv), zero())
                }),
            ),
            mk(
                "scaling".into(),
                Box::new(|g| {
                    let s = g.t * g.tt.recip() * 5.0;
                    field(s, Jet::constant(1.0), -(s * g.alpha + 4.0), zero())
                }),
            ),
        ],
        DampedCase::Cubic { c, d } => vec![
            mk(
                "cubic-1".into(),
                Box::new(move |g| {
                    let s = g.tt.recip() * (g.t * c + d) * 5.0;
                    field(s, Jet::constant(4.0 * c), -(s * g.alpha + c), zero())
                }),
            ),
            mk(
                "cubic-2".into(),
                Box::new(move |g| {
                    let q = g.t * c + d;
                    let s = g.tt.recip() * q * q;
                    field(s, q * c, -(q * c + s * g.alpha), g.tt * (c * c))
                }),
            ),
        ],
    }
}

/// Pull a generator of the gauged equation back to the original variables:
/// `τ = τ̂(T)e^{A}`, `ξ = ξ̂(T, x)`, `η = η̂_u u + e^{-A}(η̂_x x + η̂_0) − ατu`.
pub fn ungauge(eq: &EquationSpec, gen: &Generator) -> AffineField {
    let c = gen.c;
    let eq = eq.clone();
    AffineField::new(format!("ungauged[{gen}]"), move |t| {
        let g = gauge_jets(&eq, t);
        let tau = (g.t * g.t * c[2] + g.t * c[1] + c[0]) / g.tt;
        AffineJets {
            tau,
            xi1: g.t * c[2] + c[3],
            xi0: g.t * c[4] + c[5],
            eta_u: -(g.t * c[2]) + (c[3] - c[1]) - g.alpha * tau,
            eta_x: g.tt * c[2],
            eta0: g.tt * c[4],
        }
    })
}

/// Basis of the maximal Lie invariance algebra of `eq`, given the generators
/// of its gauged image (kernel generators are added if absent).
pub fn damped_basis(eq: &EquationSpec, gens: &[Generator]) -> Vec<AffineField> {
    let mut all: Vec<Generator> = gens.to_vec();
    for k in kernel_algebra() {
        if !all.contains(&k) {
            all.insert(0, k);
        }
    }
    all.iter().map(|g| ungauge(eq, g)).collect()
}

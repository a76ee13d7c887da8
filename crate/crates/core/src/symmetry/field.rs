use std::fmt;
use std::sync::Arc;

use crate::equivalence::EquationSpec;
use crate::exprcalc::chebyshev_nodes;
use crate::jet::Jet;

/// Expansions in `t` of the coefficient functions of an affine field
/// `τ(t)∂t + (ξ1 x + ξ0)∂x + (η_u u + η_x x + η0)∂u`.
#[derive(Clone, Copy, Debug)]
pub struct AffineJets {
    pub tau: Jet,
    pub xi1: Jet,
    pub xi0: Jet,
    pub eta_u: Jet,
    pub eta_x: Jet,
    pub eta0: Jet,
}

type CoefFn = dyn Fn(f64) -> AffineJets + Send + Sync;

/// Point symmetry candidate with `t`-dependent coefficients.
#[derive(Clone)]
pub struct AffineField {
    label: String,
    coeffs: Arc<CoefFn>,
}

impl fmt::Debug for AffineField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineField({})", self.label)
    }
}

impl AffineField {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> AffineJets + Send + Sync + 'static,
    ) -> Self {
        AffineField {
            label: label.into(),
            coeffs: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn jets(&self, t: f64) -> AffineJets {
        (self.coeffs)(t)
    }

    /// `(τ, ξ, η)` at a point.
    pub fn eval(&self, t: f64, x: f64, u: f64) -> (f64, f64, f64) {
        let j = self.jets(t);
        (
            j.tau.value(),
            j.xi1.value() * x + j.xi0.value(),
            j.eta_u.value() * u + j.eta_x.value() * x + j.eta0.value(),
        )
    }

    /// Linear combination `Σ k_i Q_i`.
    pub fn combine(parts: &[(f64, AffineField)]) -> AffineField {
        let parts: Vec<(f64, AffineField)> = parts.to_vec();
        let label = parts
            .iter()
            .map(|(k, q)| format!("{k}*[{}]", q.label))
            .collect::<Vec<_>>()
            .join(" + ");
        AffineField::new(label, move |t| {
            let z = Jet::constant(0.0);
            let mut acc = AffineJets {
                tau: z,
                xi1: z,
                xi0: z,
                eta_u: z,
                eta_x: z,
                eta0: z,
            };
            for (k, q) in &parts {
                let j = q.jets(t);
                acc.tau = acc.tau + j.tau * *k;
                acc.xi1 = acc.xi1 + j.xi1 * *k;
                acc.xi0 = acc.xi0 + j.xi0 * *k;
                acc.eta_u = acc.eta_u + j.eta_u * *k;
                acc.eta_x = acc.eta_x + j.eta_x * *k;
                acc.eta0 = acc.eta0 + j.eta0 * *k;
            }
            acc
        })
    }
}

/// Maximum absolute residual of each determining equation over the samples.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminingResiduals {
    /// `τβ_t − (5ξ1 − τ_t)β`, the classifying equation.
    pub classifying: f64,
    /// `η_u − ξ1 + τ_t`.
    pub scaling: f64,
    /// `η_x − ξ1_t`.
    pub boost_x: f64,
    /// `η0 − ξ0_t`.
    pub boost_0: f64,
    /// `τα_t + τ_tα + η_u,t + η_x`.
    pub damping: f64,
    /// `η_x,t + αη_x`.
    pub linear_x: f64,
    /// `η0_t + αη0`.
    pub linear_0: f64,
}

impl DeterminingResiduals {
    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.classifying,
            self.scaling,
            self.boost_x,
            self.boost_0,
            self.damping,
            self.linear_x,
            self.linear_0,
        ]
    }

    pub const NAMES: [&'static str; 7] = [
        "classifying",
        "scaling",
        "boost_x",
        "boost_0",
        "damping",
        "linear_x",
        "linear_0",
    ];
}

/// Evaluate every determining equation of the class at `samples` Chebyshev
/// nodes of the equation's interval.
pub fn determining_residuals(
    q: &AffineField,
    eq: &EquationSpec,
    samples: usize,
) -> DeterminingResiduals {
    let (lo, hi) = eq.interval();
    let mut r = [0.0f64; 7];
    for t in chebyshev_nodes(lo, hi, samples.max(1)) {
        let j = q.jets(t);
        let alpha = eq.alpha().jet(t);
        let beta = eq.beta().jet(t);
        let (a, at) = (alpha.value(), alpha.d1());
        let (tau, tau_t) = (j.tau.value(), j.tau.d1());
        let vals = [
            tau * beta.d1() - (5.0 * j.xi1.value() - tau_t) * beta.value(),
            j.eta_u.value() - j.xi1.value() + tau_t,
            j.eta_x.value() - j.xi1.d1(),
            j.eta0.value() - j.xi0.d1(),
            tau * at + tau_t * a + j.eta_u.d1() + j.eta_x.value(),
            j.eta_x.d1() + a * j.eta_x.value(),
            j.eta0.d1() + a * j.eta0.value(),
        ];
        for (acc, v) in r.iter_mut().zip(vals) {
            *acc = acc.max(if v.is_finite() {
                v.abs()
            } else {
                f64::INFINITY
            });
        }
    }
    DeterminingResiduals {
        classifying: r[0],
        scaling: r[1],
        boost_x: r[2],
        boost_0: r[3],
        damping: r[4],
        linear_x: r[5],
        linear_0: r[6],
    }
}

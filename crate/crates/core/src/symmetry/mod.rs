//! Lie symmetries of the class: generators, the classifying equation, case
//! discrimination and the un-gauged generator forms.

mod classify;
mod damped;
mod field;
mod flow;

pub use classify::{
    classify, classify_equation, classify_equation_with, classify_with, classifying_nullspace,
    CaseTag, Classification, EquationClassification, NullSpace,
};
pub use damped::{damped_basis, damped_closed_form, ungauge, DampedCase};
pub use field::{determining_residuals, AffineField, AffineJets, DeterminingResiduals};
pub use flow::{push_solution, verify_invariance_by_flow, FlowReport, FlowScheme, FlowedField};

use std::fmt;

/// `Q = (c2t²+c1t+c0)∂t + ((c2t+c3)x+c4t+c5)∂x + ((c3−c1−c2t)u+c2x+c4)∂u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Generator {
    pub c: [f64; 6],
}

impl Generator {
    pub fn new(c: [f64; 6]) -> Self {
        Generator { c }
    }

    /// Extension part `(c0, c1, c2, c3)` of a null vector.
    pub fn from_null_vector(v: [f64; 4]) -> Self {
        Generator {
            c: [v[0], v[1], v[2], v[3], 0.0, 0.0],
        }
    }

    pub fn tau(&self, t: f64) -> f64 {
        let c = &self.c;
        c[2] * t * t + c[1] * t + c[0]
    }

    pub fn xi(&self, t: f64, x: f64) -> f64 {
        let c = &self.c;
        (c[2] * t + c[3]) * x + c[4] * t + c[5]
    }

    pub fn eta(&self, t: f64, x: f64, u: f64) -> f64 {
        let c = &self.c;
        (c[3] - c[1] - c[2] * t) * u + c[2] * x + c[4]
    }

    pub fn to_field(&self) -> AffineField {
        let c = self.c;
        AffineField::new(self.to_string(), move |t| {
            let s = crate::jet::Jet::var(t);
            AffineJets {
                tau: s * s * c[2] + s * c[1] + c[0],
                xi1: s * c[2] + c[3],
                xi0: s * c[4] + c[5],
                eta_u: -(s * c[2]) + (c[3] - c[1]),
                eta_x: crate::jet::Jet::constant(c[2]),
                eta0: crate::jet::Jet::constant(c[4]),
            }
        })
    }
}

/// `⟨∂x, t∂x + ∂u⟩`, admitted by every equation of the class.
pub fn kernel_algebra() -> [Generator; 2] {
    [
        Generator::new([0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
        Generator::new([0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
    ]
}

fn fmt_coef(out: &mut Vec<String>, k: f64, term: &str) {
    if k == 0.0 {
        return;
    }
    let s = if term.is_empty() {
        format!("{k}")
    } else if k == 1.0 {
        term.to_string()
    } else if k == -1.0 {
        format!("-{term}")
    } else {
        format!("{k}{term}")
    };
    out.push(s);
}

fn component(terms: &[(f64, &str)], op: &str) -> Option<String> {
    let mut out = Vec::new();
    for &(k, term) in terms {
        fmt_coef(&mut out, k, term);
    }
    match out.len() {
        0 => None,
        1 if out[0] == "1" => Some(op.to_string()),
        1 if out[0] == "-1" => Some(format!("-{op}")),
        1 => Some(format!("{}*{op}", out[0])),
        _ => Some(format!("({})*{op}", out.join(" + ").replace("+ -", "- "))),
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.c;
        let parts: Vec<String> = [
            component(&[(c[2], "t^2"), (c[1], "t"), (c[0], "")], "Dt"),
            component(&[(c[2], "t*x"), (c[3], "x"), (c[4], "t"), (c[5], "")], "Dx"),
            component(
                &[(-c[2], "t*u"), (c[3] - c[1], "u"), (c[2], "x"), (c[4], "")],
                "Du",
            ),
        ]
        .into_iter()
        .flatten()
        .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::EquationSpec;
    use crate::exprcalc::SmoothFn;

    fn beta(text: &str, iv: (f64, f64)) -> SmoothFn {
        SmoothFn::parse(text, iv).unwrap()
    }

    fn relative_residual(q: &AffineField, eq: &EquationSpec) -> f64 {
        let (lo, hi) = eq.interval();
        let scale = eq
            .sample_points()
            .iter()
            .map(|&t| eq.beta().value(t).abs())
            .fold(1.0, f64::max)
            * (1.0 + lo.abs().max(hi.abs())).powi(2);
        determining_residuals(q, eq, 48).max() / scale
    }

    #[test]
    fn classifies_every_case() {
        let iv = (0.5, 2.0);
        let c = classify(&beta("t^1.5", iv)).unwrap();
        assert_eq!((c.case, c.extension_dim), (CaseTag::Power, 1));
        assert!((c.rho.unwrap() - 1.5).abs() < 1e-6);

        let c = classify(&beta("1/t", iv)).unwrap();
        assert_eq!(c.case, CaseTag::Power);
        assert!((c.rho_raw.unwrap() + 1.0).abs() < 1e-6);
        assert!(c.tau_roots[0].abs() < 1e-6);

        let c = classify(&beta("exp(t)", iv)).unwrap();
        assert_eq!(c.case, CaseTag::Exponential);
        assert!((c.rate.unwrap() - 1.0).abs() < 1e-6);

        let c = classify(&beta("(t^2+1)^1.5*exp(1.5*atan(t))", (-1.0, 1.0))).unwrap();
        assert_eq!(c.case, CaseTag::Arctan);
        assert!((c.nu.unwrap() - 0.3).abs() < 1e-6, "{:?}", c.nu);

        let c = classify(&beta("2", iv)).unwrap();
        assert_eq!((c.case, c.extension_dim), (CaseTag::Constant, 2));
        let close = |a: [f64; 6], b: [f64; 6]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-10);
        assert!(close(c.extension[0].c, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert!(close(c.extension[1].c, [0.0, 5.0, 0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn rejects_generic_coefficients() {
        for text in ["exp(t) + t", "t^2 + 1"] {
            let c = classify(&beta(text, (0.5, 2.0))).unwrap();
            assert_eq!(c.extension_dim, 0, "{text}: {:?}", c.singular_ratios);
            assert_eq!(c.case, CaseTag::Generic);
        }
    }

    #[test]
    fn alpha_zero_basis_satisfies_determining_system() {
        for (text, iv) in [
            ("t^1.5", (0.5, 2.0)),
            ("exp(-2*t)", (0.0, 1.0)),
            ("(t^2+1)^1.5*exp(1.5*atan(t))", (-1.0, 1.0)),
            ("(t+3)^3*exp(2/(t+3))", (0.0, 1.0)),
            ("3", (0.0, 1.0)),
        ] {
            let eq = EquationSpec::with_beta(beta(text, iv)).unwrap();
            let cls = classify_equation(&eq).unwrap();
            assert!(cls.basis.len() >= 3, "{text}");
            for q in &cls.basis {
                assert!(relative_residual(q, &eq) < 1e-7, "{text}: {}", q.label());
            }
        }
    }

    #[test]
    fn closed_forms_hold_for_arbitrary_damping() {
        let iv = (0.0, 1.0);
        let cases = [
            DampedCase::Power {
                a: 1.0,
                b: 2.0,
                c: 0.5,
                d: 1.5,
                rho: 0.7,
            },
            DampedCase::Exponential {
                a: 1.0,
                b: -1.0,
                c: 0.3,
                d: 2.0,
            },
            DampedCase::Arctan {
                a: 1.0,
                b: 0.2,
                c: -0.4,
                d: 1.0,
                nu: 0.6,
            },
            DampedCase::Constant,
            DampedCase::Cubic { c: 0.5, d: 1.0 },
        ];
        for alpha in ["sin(t)", "0.3", "t^2 - 1"] {
            let base = EquationSpec::parse(alpha, "1", iv).unwrap();
            for case in cases {
                let b = case.beta(&base, 1.7);
                let eq = EquationSpec::new(base.alpha().clone(), b).unwrap();
                for q in case.operators(&eq) {
                    let r = relative_residual(&q, &eq);
                    assert!(r < 1e-8, "{alpha} {case:?} {}: {r}", q.label());
                }
            }
        }
    }

    #[test]
    fn ungauged_basis_matches_closed_form_case() {
        let base = EquationSpec::parse("cos(t)", "1", (0.0, 1.0)).unwrap();
        let case = DampedCase::Power {
            a: 1.0,
            b: 1.0,
            c: 0.0,
            d: 1.0,
            rho: 1.5,
        };
        let eq = EquationSpec::new(base.alpha().clone(), case.beta(&base, 1.0)).unwrap();
        let cls = classify_equation(&eq).unwrap();
        assert_eq!(cls.gauged.case, CaseTag::Power);
        assert!((cls.gauged.rho.unwrap() - 1.5).abs() < 1e-6);
        for q in &cls.basis {
            assert!(relative_residual(q, &eq) < 1e-7, "{}", q.label());
        }
    }

    #[test]
    fn generator_display() {
        let g = Generator::new([0.0, 5.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(g.to_string(), "5t*Dt + x*Dx - 4u*Du");
        assert_eq!(kernel_algebra()[0].to_string(), "Dx");
        assert_eq!(kernel_algebra()[1].to_string(), "t*Dx + Du");
    }
}

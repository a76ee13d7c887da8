use fkdv::equivalence::{
    is_reducible_to_constant, map_to_constant, EquationSpec, GZeroElement, HatGElement,
};
use fkdv::{Error, Result};
use serde_json::{json, Value};

use super::equation;
use crate::args::{TransformArgs, TransformKind};
use crate::report::Outcome;

fn hatg_json(g: &HatGElement) -> Value {
    json!({
        "time_map": g.time_map().to_string(),
        "x_factor": g.x1().to_string(),
        "deltas": g.deltas(),
        "domain": g.domain(),
        "image": g.image(),
    })
}

fn g0_json(g: &GZeroElement) -> Value {
    json!({
        "a": g.a, "b": g.b, "c": g.c, "d": g.d,
        "e0": g.e0, "e1": g.e1, "e2": g.e2,
        "delta": g.delta(),
    })
}

/// Coefficients of `eq` at a few points of its interval.
fn equation_json(eq: &EquationSpec) -> Value {
    let (lo, hi) = eq.interval();
    let ts: Vec<f64> = (0..5).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect();
    json!({
        "alpha": eq.alpha().to_string(),
        "beta": eq.beta().to_string(),
        "interval": [lo, hi],
        "samples": ts.iter().map(|&t| json!({
            "t": t,
            "alpha": eq.alpha().value(t),
            "beta": eq.beta().value(t),
        })).collect::<Vec<_>>(),
    })
}

pub fn run(a: &TransformArgs) -> Result<Outcome> {
    let eq = equation(&a.eq)?;
    let results = match a.kind {
        TransformKind::Gauge => {
            let g = HatGElement::gauge(&eq)?;
            let image = g.apply_to_coefficients(&eq)?;
            let alpha_max = image
                .sample_points()
                .iter()
                .map(|&t| image.alpha().value(t).abs())
                .fold(0.0, f64::max);
            json!({
                "gauge": hatg_json(&g),
                "image": equation_json(&image),
                "alpha_residual": alpha_max,
            })
        }
        TransformKind::ReduceToConstant => {
            let rep = is_reducible_to_constant(&eq, a.tol)?;
            let mut out = json!({
                "reducible": rep.reducible,
                "c1": rep.c1,
                "c2": rep.c2,
                "statistic": rep.residual,
                "mu": rep.mu,
                "gauge_suffices": rep.gauge_suffices,
                "diagnostic": rep.diagnostic,
            });
            if rep.reducible {
                let chain = map_to_constant(&eq, a.tol)?;
                out["chain"] = json!({
                    "gauge": hatg_json(&chain.gauge),
                    "moebius": chain.moebius.as_ref().map(g0_json),
                    "image": equation_json(&chain.image),
                    "alpha_residual": chain.alpha_residual,
                    "beta_residual": chain.beta_residual,
                });
            }
            out
        }
        TransformKind::Apply => {
            let [ga, gb, gc, gd, e0, e1, e2]: [f64; 7] =
                a.element.as_slice().try_into().map_err(|_| {
                    Error::Invalid(format!(
                        "--element needs 7 values a,b,c,d,e0,e1,e2, got {}",
                        a.element.len()
                    ))
                })?;
            if !eq.is_alpha_zero() {
                return Err(Error::Invalid(
                    "apply acts on alpha = 0 equations; gauge first".into(),
                ));
            }
            let g = GZeroElement::new(ga, gb, gc, gd, e0, e1, e2)?;
            let image = g.apply_to_equation(&eq)?;
            json!({
                "element": g0_json(&g),
                "image": equation_json(&image),
            })
        }
    };
    Ok(Outcome::new(results))
}

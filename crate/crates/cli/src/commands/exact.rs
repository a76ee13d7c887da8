use std::f64::consts::TAU;

use fkdv::equivalence::EquationSpec;
use fkdv::exactsol::{cn4_field, Cn4Params, MODULUS};
use fkdv::exprcalc::SmoothFn;
use fkdv::pdesolve::{Field, Grid1D};
use fkdv::reduction::degenerate_solution;
use fkdv::Result;
use serde_json::{json, Value};

use super::{grid_csv, linspace};
use crate::args::{ExactArgs, ExactKind};
use crate::report::Outcome;

/// Points per window when the residual is requested.
const CHECK_POINTS: usize = 257;

pub fn run(a: &ExactArgs) -> Result<Outcome> {
    match a.kind {
        ExactKind::Cn4 => cn4(a),
        ExactKind::Degenerate => degenerate(a),
    }
}

fn cn4(a: &ExactArgs) -> Result<Outcome> {
    let iv = a.t_range.pair();
    let alpha = SmoothFn::parse(&a.alpha, iv)?;
    let field = cn4_field(Cn4Params::new(alpha, a.a, a.b, a.d, a.c1, a.c2)?)?;
    let period = field.spatial_period();
    // Without a period the box is only a sampling window.
    let grid = match period {
        Some(_) => field.matched_grid(a.periods, a.n)?,
        None => Grid1D::new(TAU, a.n)?,
    };
    let ts = linspace(iv.0, iv.1, a.snapshots.max(1));
    let series = ts
        .iter()
        .map(|&t| field.sample(&grid, t))
        .collect::<Result<Vec<_>>>()?;
    let residual = if a.check {
        json!(field.max_residual(&ts, (0.0, grid.length()), CHECK_POINTS))
    } else {
        Value::Null
    };
    let eq = field.equation();
    let results = json!({
        "solution": "cn4",
        "modulus": MODULUS,
        "alpha": eq.alpha().to_string(),
        "beta": eq.beta().to_string(),
        "argument_scale": field.params().scale(),
        "spatial_period": period,
        "phase_speed": field.phase_speed(),
        "grid": {"length": grid.length(), "n": grid.len()},
        "times": ts,
        "residual": residual,
    });
    Ok(Outcome::new(results).with_table("field.csv", grid_csv(&grid, &series)?))
}

fn degenerate(a: &ExactArgs) -> Result<Outcome> {
    let eq = EquationSpec::parse(&a.alpha, &a.beta, a.t_range.pair())?;
    let sol = degenerate_solution(&eq, a.a, a.b)?;
    let (lo, hi) = eq.interval();
    let ts = linspace(lo, hi, a.snapshots.max(1));
    let grid = Grid1D::new(TAU, a.n)?;
    let series = ts
        .iter()
        .map(|&t| Field::from_fn(&grid, t, |x| sol.value(t, x)))
        .collect::<Result<Vec<_>>>()?;
    let residual = if a.check {
        let mut m: f64 = 0.0;
        for &t in &ts {
            for x in linspace(-5.0, 5.0, 33) {
                let r = sol.residual_at(t, x);
                m = m.max(if r.is_finite() {
                    r.abs()
                } else {
                    f64::INFINITY
                });
            }
        }
        json!(m)
    } else {
        Value::Null
    };
    let results = json!({
        "solution": "degenerate",
        "formula": "u = (x + b) exp(-A(t)) / (T(t) + a)",
        "alpha": eq.alpha().to_string(),
        "beta": eq.beta().to_string(),
        "a": sol.a,
        "b": sol.b,
        "times": ts,
        "residual": residual,
    });
    Ok(Outcome::new(results).with_table("field.csv", grid_csv(&grid, &series)?))
}

use fkdv::pdesolve::Grid1D;
use fkdv::reduction::{
    build_reduction, gaussian, reconstruct, write_trajectory_csv, ReductionRecipe, State,
    SubalgebraLabel, SubalgebraSpec, Tolerances,
};
use fkdv::symmetry::CaseTag;
use fkdv::{Error, Result};
use serde_json::json;

use super::linspace;
use crate::args::ReduceArgs;
use crate::report::Outcome;

fn case_of(row: u8) -> Result<CaseTag> {
    Ok(match row {
        0 => CaseTag::Generic,
        1 => CaseTag::Power,
        2 => CaseTag::Exponential,
        3 => CaseTag::Arctan,
        4 => CaseTag::Constant,
        _ => return Err(Error::Invalid(format!("--case must be 0..4, got {row}"))),
    })
}

fn default_label(case: CaseTag, rho: Option<f64>) -> SubalgebraLabel {
    match case {
        CaseTag::Generic => SubalgebraLabel::GA,
        CaseTag::Power if rho == Some(-1.0) => SubalgebraLabel::G12,
        CaseTag::Power => SubalgebraLabel::G11,
        CaseTag::Exponential => SubalgebraLabel::G2,
        CaseTag::Arctan => SubalgebraLabel::G3,
        CaseTag::Constant => SubalgebraLabel::G41,
    }
}

/// Spatial window that keeps `ω` inside the central 80% of `span` at every
/// time in `ts`. `ω` is affine in `x` for every reduction; a constant `ω`
/// (the first-order branch) leaves `x` free.
fn window(r: &ReductionRecipe, ts: &[f64], span: (f64, f64)) -> Option<(f64, f64)> {
    let margin = 0.1 * (span.1 - span.0);
    let (wlo, whi) = (span.0 + margin, span.1 - margin);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for &t in ts {
        let w0 = r.omega_at(t, 0.0);
        let slope = r.omega_at(t, 1.0) - w0;
        if slope == 0.0 {
            if !(wlo..=whi).contains(&w0) {
                return None;
            }
            continue;
        }
        let (a, b) = ((wlo - w0) / slope, (whi - w0) / slope);
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    if lo == f64::NEG_INFINITY {
        return Some((-1.0, 1.0));
    }
    (lo < hi).then_some((lo, hi))
}

pub fn run(a: &ReduceArgs) -> Result<Outcome> {
    let row = a
        .case
        .ok_or_else(|| Error::Invalid("--case is required".into()))?;
    let case = case_of(row)?;
    if case == CaseTag::Power && a.rho.is_none() {
        return Err(Error::Invalid("case 1 needs --rho".into()));
    }
    let label = match &a.subalgebra {
        Some(s) => SubalgebraLabel::parse(s)?,
        None => default_label(case, a.rho),
    };
    let spec = SubalgebraSpec::new(case, label, a.a, a.sigma, a.rho, a.nu)?;
    let recipe = build_reduction(&spec)?;
    let t_range = a.t_range.pair();
    let eq = recipe.equation(t_range)?;
    let span = a.span.pair();
    let w0 = a.w0.unwrap_or(span.0);
    let ic: State = if recipe.order() == 1 {
        [a.phi0, 0.0, 0.0, 0.0, 0.0]
    } else {
        a.ic.as_slice()
            .try_into()
            .map_err(|_| Error::Invalid(format!("--ic needs 5 values, got {}", a.ic.len())))?
    };
    let tol = Tolerances {
        rel: a.rtol,
        abs: a.atol,
    };
    let traj = recipe.integrate(w0, ic, span, tol)?;
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &traj)?;

    let mut ts = linspace(t_range.0, t_range.1, 3);
    if recipe.order() == 1 {
        // ω = t here, so the window must sit inside the trajectory.
        let m = 0.1 * (traj.span.1 - traj.span.0);
        let (lo, hi) = (
            t_range.0.max(traj.span.0 + m),
            t_range.1.min(traj.span.1 - m),
        );
        if lo < hi {
            ts = linspace(lo, hi, 3);
        }
    }
    let probe: Vec<(f64, f64)> = ts
        .iter()
        .flat_map(|&t| linspace(-1.0, 1.0, 9).into_iter().map(move |x| (t, x)))
        .collect();
    let (worst, scale) = recipe.certify(&eq, &probe, &gaussian);
    let reconstruction = match window(&recipe, &ts, traj.span) {
        None => {
            json!({"status": "skipped", "message": "omega of the time window falls outside the trajectory"})
        }
        Some((lo, hi)) => {
            let grid = Grid1D::new(hi - lo, a.x_points.max(2))?;
            match reconstruct(&recipe, &traj, &eq, &grid, lo, &ts) {
                Ok(rec) => json!({
                    "status": "ok",
                    "residual": rec.residual,
                    "x_window": [lo, hi],
                    "times": ts,
                }),
                Err(e @ Error::OffGrid(_)) => {
                    json!({"status": "skipped", "message": e.to_string()})
                }
                Err(e) => return Err(e),
            }
        }
    };
    let last = traj.values.last().copied().unwrap_or(ic);
    let results = json!({
        "case": case.name(),
        "subalgebra": label.name(),
        "generator": {"c": spec.generator.c, "field": spec.generator.to_string()},
        "beta": eq.beta().to_string(),
        "omega": recipe.omega_text(),
        "ansatz": recipe.ansatz_text(),
        "ode": recipe.ode_text(),
        "order": recipe.order(),
        "omega0": w0,
        "initial": ic[..recipe.order()].to_vec(),
        "span": [traj.span.0, traj.span.1],
        "final": {"omega": traj.nodes.last(), "state": last[..recipe.order()].to_vec()},
        "stats": {
            "accepted": traj.stats.accepted,
            "rejected": traj.stats.rejected,
            "evaluations": traj.stats.evaluations,
        },
        "ansatz_check": {"max_mismatch": worst, "max_pde_residual": scale},
        "reconstruction": reconstruction,
    });
    Ok(Outcome::new(results).with_table("trajectory.csv", csv))
}

use std::fs::File;
use std::io::BufReader;

use fkdv::pdesolve::io::read_grid_csv;
use fkdv::pdesolve::SpectralField;
use fkdv::symmetry::{
    determining_residuals, ungauge, verify_invariance_by_flow, FlowScheme, Generator,
};
use fkdv::{Error, Result};
use serde_json::{json, Value};

use super::equation;
use crate::args::{Scheme, VerifyArgs};
use crate::report::Outcome;

/// Cap on the sample times and positions of the flow check.
const MAX_TIMES: usize = 5;
const MAX_XS: usize = 32;

fn thin(v: &[f64], cap: usize) -> Vec<f64> {
    if v.len() <= cap {
        return v.to_vec();
    }
    (0..cap).map(|i| v[i * (v.len() - 1) / (cap - 1)]).collect()
}

pub fn run(a: &VerifyArgs) -> Result<Outcome> {
    let eq = equation(&a.eq)?;
    let c: [f64; 6] = a.generator.as_slice().try_into().map_err(|_| {
        Error::Invalid(format!(
            "--generator needs 6 values c0..c5, got {}",
            a.generator.len()
        ))
    })?;
    let g = Generator::new(c);
    let q = if eq.is_alpha_zero() {
        g.to_field()
    } else {
        ungauge(&eq, &g)
    };
    let det = determining_residuals(&q, &eq, a.samples);
    let mut results = json!({
        "generator": {"c": c, "field": q.label()},
        "determining_residuals": {
            "classifying": det.classifying,
            "scaling": det.scaling,
            "boost_x": det.boost_x,
            "boost_0": det.boost_0,
            "damping": det.damping,
            "linear_x": det.linear_x,
            "linear_0": det.linear_0,
            "max": det.max(),
        },
        "flow": Value::Null,
    });
    let Some(path) = &a.solution else {
        return Ok(Outcome::new(results));
    };
    let file = File::open(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let (grid, series) = read_grid_csv(BufReader::new(file))?;
    let (t_first, t_last) = (series[0].t, series[series.len() - 1].t);
    let (lo, hi) = eq.interval();
    if t_first < lo || t_last > hi {
        return Err(Error::Invalid(format!(
            "solution covers t in [{t_first}, {t_last}], outside --t-range {lo}:{hi}"
        )));
    }
    let field = SpectralField::new(grid, &eq, &series, a.stencil)?;
    // Keep clear of the ends by the time shift of the flow.
    let tau = [t_first, 0.5 * (t_first + t_last), t_last]
        .iter()
        .map(|&t| q.eval(t, 0.0, 0.0).0.abs())
        .fold(0.0, f64::max);
    let margin = 1.5 * a.eps.abs() * tau;
    let inner: Vec<f64> = series
        .iter()
        .map(|f| f.t)
        .filter(|&t| t >= t_first + margin && t <= t_last - margin)
        .collect();
    if inner.is_empty() {
        return Err(Error::Invalid(format!(
            "eps = {} moves every stored time outside the run",
            a.eps
        )));
    }
    let times = thin(
        &inner[inner.len() / 4..inner.len() - inner.len() / 4],
        MAX_TIMES,
    );
    let xs = thin(&grid.points(), MAX_XS);
    let scheme = match a.scheme {
        Scheme::Rk4 => FlowScheme::Rk4 { steps: a.substeps },
        Scheme::Euler => FlowScheme::Euler,
    };
    let rep = verify_invariance_by_flow(&q, &eq, &field, a.eps, scheme, &times, &xs);
    results["flow"] = json!({
        "eps": rep.eps,
        "pre": rep.pre,
        "post": rep.post,
        "excess": rep.excess,
        "ratio": rep.post / rep.pre,
        "times": times,
        "points": xs.len(),
    });
    Ok(Outcome::new(results))
}

mod classify;
mod exact;
mod reduce;
mod solve;
mod transform;
mod verify;

use fkdv::equivalence::EquationSpec;
use fkdv::pdesolve::io::write_grid_csv;
use fkdv::pdesolve::{Field, Grid1D};
use fkdv::{Error, Result};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Command, EquationArgs, ExactKind, Output, TransformKind};
use crate::report::Outcome;

/// Manifest label, echoed inputs and output settings of a command.
pub fn describe(cmd: &Command) -> (String, Value, Output) {
    fn echo<T: Serialize>(a: &T) -> Value {
        serde_json::to_value(a).unwrap_or(Value::Null)
    }
    match cmd {
        Command::Classify(a) => ("classify".into(), echo(a), a.output.clone()),
        Command::Reduce(a) => ("reduce".into(), echo(a), a.output.clone()),
        Command::Solve(a) => ("solve".into(), echo(a), a.output.clone()),
        Command::Exact(a) => {
            let kind = match a.kind {
                ExactKind::Cn4 => "cn4",
                ExactKind::Degenerate => "degenerate",
            };
            (format!("exact {kind}"), echo(a), a.output.clone())
        }
        Command::Verify(a) => ("verify".into(), echo(a), a.output.clone()),
        Command::Transform(a) => {
            let kind = match a.kind {
                TransformKind::Gauge => "gauge",
                TransformKind::ReduceToConstant => "reduce-to-constant",
                TransformKind::Apply => "apply",
            };
            (format!("transform {kind}"), echo(a), a.output.clone())
        }
    }
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Classify(a) => classify::run(a),
        Command::Reduce(a) => reduce::run(a),
        Command::Solve(a) => solve::run(a),
        Command::Exact(a) => exact::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Transform(a) => transform::run(a),
    }
}

fn equation(a: &EquationArgs) -> Result<EquationSpec> {
    let beta = a
        .beta
        .as_deref()
        .ok_or_else(|| Error::Invalid("--beta is required".into()))?;
    EquationSpec::parse(&a.alpha, beta, a.t_range.pair())
}

fn grid_csv(grid: &Grid1D, series: &[Field]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_grid_csv(&mut buf, grid, series)?;
    Ok(buf)
}

/// `n` evenly spaced points covering `[lo, hi]`.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

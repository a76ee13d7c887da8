use std::io::{BufRead, Write};

use super::integrator::MonitorRecord;
use super::spectral::{Field, Grid1D};
use crate::error::{Error, Result};

fn io_err(e: std::io::Error) -> Error {
    Error::Invalid(format!("i/o: {e}"))
}

/// Write snapshots as `t,x,u` rows, snapshot by snapshot.
pub fn write_grid_csv(out: &mut impl Write, grid: &Grid1D, series: &[Field]) -> Result<()> {
    writeln!(out, "t,x,u").map_err(io_err)?;
    for f in series {
        for (j, u) in f.values.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", f.t, grid.x(j), u).map_err(io_err)?;
        }
    }
    Ok(())
}

/// Read a `t,x,u` dump. The grid length is recovered from the spacing.
pub fn read_grid_csv(input: impl BufRead) -> Result<(Grid1D, Vec<Field>)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Invalid("empty grid file".into()))?
        .map_err(io_err)?;
    if header.trim() != "t,x,u" {
        return Err(Error::Invalid(format!(
            "expected header `t,x,u`, got `{header}`"
        )));
    }
    let mut series: Vec<Field> = Vec::new();
    let mut xs: Vec<f64> = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Invalid(format!("line {}: {e}", i + 2)))?;
        let [t, x, u] = parts[..] else {
            return Err(Error::Invalid(format!(
                "line {}: expected 3 columns",
                i + 2
            )));
        };
        match series.last_mut() {
            Some(f) if f.t == t => f.values.push(u),
            _ => series.push(Field { t, values: vec![u] }),
        }
        if series.len() == 1 {
            xs.push(x);
        }
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::Invalid(
            "grid file holds fewer than two points".into(),
        ));
    }
    let grid = Grid1D::new((xs[1] - xs[0]) * n as f64, n)?;
    for f in &series {
        if f.values.len() != n {
            return Err(Error::Invalid(format!(
                "snapshot at t = {} has {} points, expected {n}",
                f.t,
                f.values.len()
            )));
        }
    }
    let series = series
        .into_iter()
        .map(|f| Field::new(f.t, f.values))
        .collect::<Result<Vec<_>>>()?;
    Ok((grid, series))
}

pub fn write_monitor_csv(out: &mut impl Write, log: &[MonitorRecord]) -> Result<()> {
    writeln!(out, "t,mass,momentum2,density3").map_err(io_err)?;
    for r in log {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            r.t, r.mass, r.momentum2, r.density3
        )
        .map_err(io_err)?;
    }
    Ok(())
}

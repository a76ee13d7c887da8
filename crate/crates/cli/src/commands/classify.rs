use fkdv::symmetry::{classify_equation_with, determining_residuals};
use fkdv::Result;
use serde_json::json;

use super::equation;
use crate::args::ClassifyArgs;
use crate::report::Outcome;

pub fn run(a: &ClassifyArgs) -> Result<Outcome> {
    let eq = equation(&a.eq)?;
    let ec = classify_equation_with(&eq, a.samples, a.svd_tol)?;
    let c = &ec.gauged;
    let basis: Vec<_> = c
        .basis()
        .iter()
        .map(|g| json!({"c": g.c, "field": g.to_string()}))
        .collect();
    // Residuals are taken in the variables of the input equation.
    let residuals: Vec<f64> = ec
        .basis
        .iter()
        .map(|q| determining_residuals(q, &eq, a.samples).max())
        .collect();
    let mut csv = String::from("c0,c1,c2,c3,c4,c5\n");
    for g in c.basis() {
        let row: Vec<String> = g.c.iter().map(|v| format!("{v:.16e}")).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    let mut results = json!({
        "extension_dim": c.extension_dim,
        "case": c.case.name(),
        "case_index": c.case.index(),
        "parameters": {
            "rho": c.rho,
            "rho_raw": c.rho_raw,
            "nu": c.nu,
            "nu_raw": c.nu_raw,
            "rate": c.rate,
            "lambda": c.lambda,
            "tau_roots": c.tau_roots,
        },
        "basis": basis,
        "nullspace_residual": c.nullspace_residual,
        "singular_ratios": c.singular_ratios,
        "determining_residuals": residuals,
    });
    if !eq.is_alpha_zero() {
        results["damped_basis"] = ec.basis.iter().map(|q| q.label().to_string()).collect();
        results["gauged_beta"] = ec
            .gauge
            .apply_to_coefficients(&eq)?
            .beta()
            .to_string()
            .into();
    }
    Ok(Outcome::new(results).with_table("basis.csv", csv.into_bytes()))
}

use std::fmt;

use nalgebra::DMatrix;

use super::{damped_basis, kernel_algebra, AffineField, Generator};
use crate::equivalence::{EquationSpec, HatGElement};
use crate::error::{Error, Result};
use crate::exprcalc::{chebyshev_nodes, SmoothFn};

/// Singular values at least this far above the cut count as nonzero.
const GAP_TOL: f64 = 1e-4;
pub const DEFAULT_SAMPLES: usize = 64;
pub const DEFAULT_SVD_TOL: f64 = 1e-8;
const ROOT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    Generic,
    Power,
    Exponential,
    Arctan,
    Constant,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::Generic => "generic",
            CaseTag::Power => "power",
            CaseTag::Exponential => "exponential",
            CaseTag::Arctan => "arctan",
            CaseTag::Constant => "constant",
        }
    }

    /// Position of the case in the classification, 0 to 4.
    pub fn index(self) -> u8 {
        match self {
            CaseTag::Generic => 0,
            CaseTag::Power => 1,
            CaseTag::Exponential => 2,
            CaseTag::Arctan => 3,
            CaseTag::Constant => 4,
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Numerical solution space of the classifying equation in `(c0, c1, c2, c3)`.
#[derive(Clone, Debug)]
pub struct NullSpace {
    pub basis: Vec<[f64; 4]>,
    /// Worst normalized row residual of a retained vector.
    pub residual: f64,
    /// `σ_i / σ_max`, decreasing.
    pub singular_ratios: [f64; 4],
}

/// Solve `(c2t²+c1t+c0)β_t = (3c2t−c1+5c3)β` for the constants by SVD of the
/// sampled system. Rank is decided by the gap rule: `k` zero singular values
/// need `σ/σ_max ≤ svd_tol` for those and `≥ 1e-4` for the rest.
pub fn classifying_nullspace(beta: &SmoothFn, samples: usize, svd_tol: f64) -> Result<NullSpace> {
    if samples < 8 {
        return Err(Error::Invalid(
            "at least 8 sample points are required".into(),
        ));
    }
    let (lo, hi) = beta.interval();
    let mut rows: Vec<[f64; 4]> = Vec::with_capacity(samples);
    for t in chebyshev_nodes(lo, hi, samples) {
        let j = beta.jet(t);
        let (b, bt) = (j.value(), j.d1());
        let row = [bt, t * bt + b, t * t * bt - 3.0 * t * b, -5.0 * b];
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if row.iter().all(|v| v.is_finite()) && norm > 0.0 {
            rows.push(row.map(|v| v / norm));
        }
    }
    if rows.len() < 8 {
        return Err(Error::Invalid(format!(
            "only {} valid samples of beta and beta_t",
            rows.len()
        )));
    }
    let mut col_scale = [0.0f64; 4];
    for r in &rows {
        for (s, v) in col_scale.iter_mut().zip(r) {
            *s += v * v;
        }
    }
    // Columns that vanish up to roundoff are left unscaled so noise is not
    // amplified into a spurious nonzero singular value.
    let col_max = col_scale.iter().cloned().fold(0.0, f64::max).sqrt();
    let col_scale = col_scale.map(|s| {
        let s = s.sqrt();
        if s > 1e-6 * col_max {
            s
        } else {
            col_max
        }
    });
    let m = DMatrix::from_fn(rows.len(), 4, |i, j| rows[i][j] / col_scale[j]);
    let svd = m.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD failed".into()))?;
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let smax = svd.singular_values[order[0]];
    if smax == 0.0 {
        return Err(Error::Invalid(
            "classifying matrix vanishes (beta = 0)".into(),
        ));
    }
    let ratios: [f64; 4] = std::array::from_fn(|i| svd.singular_values[order[i]] / smax);
    let zero = ratios.iter().filter(|&&r| r <= svd_tol).count();
    let nonzero = ratios.iter().filter(|&&r| r >= GAP_TOL).count();
    if zero + nonzero != 4 {
        return Err(Error::Inconclusive {
            low: zero,
            high: 4 - nonzero,
            ratios: ratios.to_vec(),
        });
    }
    if zero > 2 {
        return Err(Error::Numerical(format!(
            "null space of dimension {zero} is impossible for nonzero beta"
        )));
    }
    let mut basis = Vec::with_capacity(zero);
    let mut residual: f64 = 0.0;
    for &k in &order[4 - zero..] {
        let y: [f64; 4] = std::array::from_fn(|j| v_t[(k, j)]);
        for r in &rows {
            let v: f64 = (0..4).map(|j| r[j] / col_scale[j] * y[j]).sum();
            residual = residual.max(v.abs());
        }
        let c: [f64; 4] = std::array::from_fn(|j| y[j] / col_scale[j]);
        basis.push(c);
    }
    Ok(NullSpace {
        basis,
        residual,
        singular_ratios: ratios,
    })
}

/// Classification of `u_t + u u_x + β(t) u_xxxxx = 0`.
#[derive(Clone, Debug)]
pub struct Classification {
    pub extension_dim: usize,
    pub case: CaseTag,
    /// Power exponent normalized to `ρ ≤ 3/2`.
    pub rho: Option<f64>,
    /// Exponent as read off the null vector.
    pub rho_raw: Option<f64>,
    /// Arctan parameter normalized to `ν ≥ 0`.
    pub nu: Option<f64>,
    pub nu_raw: Option<f64>,
    /// Exponential case: `β ∝ e^{rate·t}` (single case) or the coefficient
    /// in `(t−r)³e^{rate/(t−r)}` (double root).
    pub rate: Option<f64>,
    /// Roots of `τ = c2t²+c1t+c0` (real parts for complex roots, with the
    /// imaginary part in the second slot).
    pub tau_roots: Vec<f64>,
    /// `β(mid) / canonical(mid)`.
    pub lambda: f64,
    pub extension: Vec<Generator>,
    pub nullspace_residual: f64,
    pub singular_ratios: [f64; 4],
}

impl Classification {
    /// Kernel pair followed by the extension generators.
    pub fn basis(&self) -> Vec<Generator> {
        let mut b = kernel_algebra().to_vec();
        b.extend(self.extension.iter().copied());
        b
    }
}

pub fn classify(beta: &SmoothFn) -> Result<Classification> {
    classify_with(beta, DEFAULT_SAMPLES, DEFAULT_SVD_TOL)
}

fn scale_to(v: [f64; 4], idx: usize, target: f64) -> [f64; 4] {
    let k = target / v[idx];
    v.map(|x| x * k)
}

fn rref2(a: [f64; 4], b: [f64; 4]) -> ([f64; 4], [f64; 4]) {
    let mut m = [a, b];
    let mut row = 0;
    for col in 0..4 {
        if row == 2 {
            break;
        }
        let p = (row..2)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        let scale = m[p][col].abs();
        if scale < 1e-10 * m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())) {
            continue;
        }
        m.swap(row, p);
        let piv = m[row][col];
        m[row] = m[row].map(|v| v / piv);
        let other = 1 - row;
        let f = m[other][col];
        for j in 0..4 {
            m[other][j] -= f * m[row][j];
        }
        row += 1;
    }
    for r in &mut m {
        for v in r.iter_mut() {
            if v.abs() < 1e-12 {
                *v = 0.0;
            }
        }
    }
    (m[0], m[1])
}

pub fn classify_with(beta: &SmoothFn, samples: usize, svd_tol: f64) -> Result<Classification> {
    let ns = classifying_nullspace(beta, samples, svd_tol)?;
    let (lo, hi) = beta.interval();
    let mid = 0.5 * (lo + hi);
    let mut out = Classification {
        extension_dim: ns.basis.len(),
        case: CaseTag::Generic,
        rho: None,
        rho_raw: None,
        nu: None,
        nu_raw: None,
        rate: None,
        tau_roots: Vec::new(),
        lambda: beta.value(mid),
        extension: Vec::new(),
        nullspace_residual: ns.residual,
        singular_ratios: ns.singular_ratios,
    };
    match ns.basis.len() {
        0 => {}
        2 => {
            let (p, q) = rref2(ns.basis[0], ns.basis[1]);
            let lead = |v: &[f64; 4]| v.iter().position(|x| *x != 0.0).unwrap_or(0);
            let p = scale_to(p, lead(&p), 1.0);
            let q = if q[1] != 0.0 {
                scale_to(q, 1, 5.0)
            } else {
                scale_to(q, lead(&q), 1.0)
            };
            out.case = CaseTag::Constant;
            out.extension = vec![
                Generator::from_null_vector(p),
                Generator::from_null_vector(q),
            ];
        }
        _ => discriminate(&mut out, ns.basis[0], beta, lo, hi)?,
    }
    Ok(out)
}

fn discriminate(
    out: &mut Classification,
    v: [f64; 4],
    beta: &SmoothFn,
    lo: f64,
    hi: f64,
) -> Result<()> {
    let [c0, c1, c2, c3] = v;
    let tm = lo.abs().max(hi.abs()).max(1.0);
    let scale = c0.abs().max(c1.abs() * tm).max(c2.abs() * tm * tm);
    let tol = ROOT_TOL * scale;
    let mid = 0.5 * (lo + hi);
    let bmid = beta.value(mid);
    if c2.abs() * tm * tm <= tol {
        if c1.abs() * tm > tol {
            let v = scale_to([c0, c1, 0.0, c3], 1, 5.0);
            let rho = v[3] - 1.0;
            let r = -v[0] / 5.0;
            out.case = CaseTag::Power;
            out.rho_raw = Some(rho);
            out.rho = Some(rho.min(3.0 - rho));
            out.tau_roots = vec![r];
            out.lambda = bmid / (mid - r).abs().powf(rho);
            out.extension = vec![Generator::from_null_vector(v)];
        } else {
            let v = scale_to([c0, 0.0, 0.0, c3], 0, 5.0);
            let kappa = v[3];
            out.case = CaseTag::Exponential;
            out.rate = Some(kappa);
            out.lambda = bmid / (kappa * mid).exp();
            out.extension = vec![Generator::from_null_vector(v)];
        }
        return Ok(());
    }
    let v = scale_to(v, 2, 1.0);
    let [c0, c1, _, c3] = v;
    out.extension = vec![Generator::from_null_vector(v)];
    let disc = c1 * c1 - 4.0 * c0;
    let disc_tol = ROOT_TOL * (c1 * c1).max(4.0 * c0.abs()).max(1.0);
    if disc > disc_tol {
        let sq = disc.sqrt();
        let (r1, r2) = ((-c1 - sq) / 2.0, (-c1 + sq) / 2.0);
        let p = (3.0 * r1 - c1 + 5.0 * c3) / (r1 - r2);
        out.case = CaseTag::Power;
        out.rho_raw = Some(p);
        out.rho = Some(p.min(3.0 - p));
        out.tau_roots = vec![r1, r2];
        out.lambda = bmid / ((mid - r1).abs().powf(p) * (mid - r2).abs().powf(3.0 - p));
    } else if disc < -disc_tol {
        let (p, q) = (-c1 / 2.0, (-disc).sqrt() / 2.0);
        let k = 3.0 * p - c1 + 5.0 * c3;
        let nu = k / (5.0 * q);
        let s = (mid - p) / q;
        out.case = CaseTag::Arctan;
        out.nu_raw = Some(nu);
        out.nu = Some(nu.abs());
        out.tau_roots = vec![p, q];
        out.lambda = bmid / ((s * s + 1.0).powf(1.5) * (5.0 * nu * s.atan()).exp());
    } else {
        let r = -c1 / 2.0;
        let k = 3.0 * r - c1 + 5.0 * c3;
        out.case = CaseTag::Exponential;
        out.rate = Some(-k);
        out.tau_roots = vec![r, r];
        out.lambda = bmid / ((mid - r).abs().powi(3) * (-k / (mid - r)).exp());
    }
    Ok(())
}

/// Classification of a general member: the gauged equation is classified
/// and its generators are carried back to the original variables.
#[derive(Clone, Debug)]
pub struct EquationClassification {
    pub gauged: Classification,
    /// Basis in the original variables (kernel first).
    pub basis: Vec<AffineField>,
    pub gauge: HatGElement,
}

pub fn classify_equation(eq: &EquationSpec) -> Result<EquationClassification> {
    classify_equation_with(eq, DEFAULT_SAMPLES, DEFAULT_SVD_TOL)
}

pub fn classify_equation_with(
    eq: &EquationSpec,
    samples: usize,
    svd_tol: f64,
) -> Result<EquationClassification> {
    let gauge = HatGElement::gauge(eq)?;
    if eq.is_alpha_zero() {
        let gauged = classify_with(eq.beta(), samples, svd_tol)?;
        let basis = gauged.basis().iter().map(Generator::to_field).collect();
        return Ok(EquationClassification {
            gauged,
            basis,
            gauge,
        });
    }
    let gauged_beta = gauge.apply_to_coefficients(eq)?.beta().clone();
    let gauged = classify_with(&gauged_beta, samples, svd_tol)?;
    let basis = damped_basis(eq, &gauged.basis());
    Ok(EquationClassification {
        gauged,
        basis,
        gauge,
    })
}

//! Optimal systems of one-dimensional subalgebras, similarity reductions to
//! fifth-order ODEs, their integration and reconstruction of `u(t, x)`.

mod degenerate;
pub mod ode;

pub use degenerate::{degenerate_solution, DegenerateSolution};
pub use ode::{integrate, write_trajectory_csv, IntegratorStats, OdeTrajectory, State, Tolerances};

use std::fmt;

use crate::equivalence::EquationSpec;
use crate::error::{Error, Result};
use crate::exprcalc::SmoothFn;
use crate::jet::Jet;
use crate::pdesolve::{Field, Grid1D};
use crate::symmetry::{CaseTag, Generator};

/// Subalgebra families of the optimal systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubalgebraLabel {
    /// `⟨∂x⟩`.
    G,
    /// `⟨(t+a)∂x + ∂u⟩` (general β).
    GA,
    /// `⟨(t+σ)∂x + ∂u⟩` (power case).
    GSigma,
    /// `⟨t∂x + ∂u⟩` (exponential case).
    GZero,
    G11,
    G12,
    G2,
    G3,
    G41,
    G42,
    G43,
}

impl SubalgebraLabel {
    pub fn name(self) -> &'static str {
        match self {
            SubalgebraLabel::G => "g",
            SubalgebraLabel::GA => "ga",
            SubalgebraLabel::GSigma => "gsigma",
            SubalgebraLabel::GZero => "g0",
            SubalgebraLabel::G11 => "g1.1",
            SubalgebraLabel::G12 => "g1.2",
            SubalgebraLabel::G2 => "g2",
            SubalgebraLabel::G3 => "g3",
            SubalgebraLabel::G41 => "g4.1",
            SubalgebraLabel::G42 => "g4.2",
            SubalgebraLabel::G43 => "g4.3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let all = [
            SubalgebraLabel::G,
            SubalgebraLabel::GA,
            SubalgebraLabel::GSigma,
            SubalgebraLabel::GZero,
            SubalgebraLabel::G11,
            SubalgebraLabel::G12,
            SubalgebraLabel::G2,
            SubalgebraLabel::G3,
            SubalgebraLabel::G41,
            SubalgebraLabel::G42,
            SubalgebraLabel::G43,
        ];
        let key = s.trim().to_ascii_lowercase().replace(['_', '^'], "");
        let key = match key.as_str() {
            "g0a" | "gaa" => "ga",
            "gs" => "gsigma",
            other => other,
        };
        all.into_iter()
            .find(|l| l.name() == key)
            .ok_or_else(|| Error::Invalid(format!("unknown subalgebra label `{s}`")))
    }
}

impl fmt::Display for SubalgebraLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One member of an optimal system, with its parameters filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct SubalgebraSpec {
    pub case: CaseTag,
    pub label: SubalgebraLabel,
    pub a: f64,
    pub sigma: i8,
    pub rho: Option<f64>,
    pub nu: Option<f64>,
    pub generator: Generator,
}

fn generator_of(label: SubalgebraLabel, a: f64, sigma: i8, rho: f64, nu: f64) -> Generator {
    let s = sigma as f64;
    let c = match label {
        SubalgebraLabel::G => [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        SubalgebraLabel::GA => [0.0, 0.0, 0.0, 0.0, 1.0, a],
        SubalgebraLabel::GSigma => [0.0, 0.0, 0.0, 0.0, 1.0, s],
        SubalgebraLabel::GZero => [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        SubalgebraLabel::G11 => [0.0, 5.0, 0.0, rho + 1.0, 0.0, 0.0],
        SubalgebraLabel::G12 => [0.0, 1.0, 0.0, 0.0, 0.0, a],
        SubalgebraLabel::G2 => [5.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        SubalgebraLabel::G3 => [1.0, 0.0, 1.0, nu, 0.0, 0.0],
        SubalgebraLabel::G41 => [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        // The sign selector follows the reduced ODE `φ⁽⁵⁾ = −φφ′ + σ`,
        // which comes from `−σ∂t + t∂x + ∂u`.
        SubalgebraLabel::G42 => [-s, 0.0, 0.0, 0.0, 1.0, 0.0],
        SubalgebraLabel::G43 => [0.0, 5.0, 0.0, 1.0, 0.0, 0.0],
    };
    Generator::new(c)
}

impl SubalgebraSpec {
    /// Member of the given case with parameters. `rho` is needed for the
    /// power case and `nu` for the arctan case.
    pub fn new(
        case: CaseTag,
        label: SubalgebraLabel,
        a: f64,
        sigma: i8,
        rho: Option<f64>,
        nu: Option<f64>,
    ) -> Result<Self> {
        use SubalgebraLabel as L;
        let allowed: &[L] = match case {
            CaseTag::Generic => &[L::G, L::GA],
            CaseTag::Power if rho == Some(-1.0) => &[L::G, L::GSigma, L::G12, L::GA],
            CaseTag::Power => &[L::G, L::GSigma, L::G11, L::GA],
            CaseTag::Exponential => &[L::G, L::GZero, L::G2, L::GA],
            CaseTag::Arctan => &[L::G, L::G3, L::GA],
            CaseTag::Constant => &[L::G, L::G41, L::G42, L::G43, L::GA],
        };
        if !allowed.contains(&label) {
            let names: Vec<&str> = allowed.iter().map(|l| l.name()).collect();
            return Err(Error::Invalid(format!(
                "subalgebra {label} does not belong to case {} (allowed: {})",
                case.index(),
                names.join(", ")
            )));
        }
        if !matches!(sigma, -1..=1) {
            return Err(Error::Invalid(format!(
                "sigma must be -1, 0 or 1, got {sigma}"
            )));
        }
        if case == CaseTag::Power && rho.is_none() {
            return Err(Error::Invalid("the power case needs rho".into()));
        }
        if case == CaseTag::Arctan && nu.is_none() {
            return Err(Error::Invalid("the arctan case needs nu".into()));
        }
        let generator = generator_of(label, a, sigma, rho.unwrap_or(0.0), nu.unwrap_or(0.0));
        Ok(SubalgebraSpec {
            case,
            label,
            a,
            sigma,
            rho,
            nu,
            generator,
        })
    }

    /// `β` of the representative equation of the case.
    pub fn beta(&self, interval: (f64, f64)) -> Result<SmoothFn> {
        let text = match self.case {
            CaseTag::Generic | CaseTag::Constant => "1".to_string(),
            CaseTag::Power => format!("t^({:?})", self.rho.unwrap_or(0.0)),
            CaseTag::Exponential => "exp(t)".to_string(),
            CaseTag::Arctan => format!(
                "(t^2+1)^1.5*exp({:?}*atan(t))",
                5.0 * self.nu.unwrap_or(0.0)
            ),
        };
        SmoothFn::parse(&text, interval)
    }
}

/// Members of the optimal system of `case` with parameter slots at their
/// defaults (`a = 0`, `σ = 1`).
pub fn optimal_system(case: CaseTag, rho: Option<f64>, nu: Option<f64>) -> Vec<SubalgebraSpec> {
    use SubalgebraLabel as L;
    let labels: &[L] = match case {
        CaseTag::Generic => &[L::G, L::GA],
        CaseTag::Power if rho == Some(-1.0) => &[L::G, L::GSigma, L::G12],
        CaseTag::Power => &[L::G, L::GSigma, L::G11],
        CaseTag::Exponential => &[L::G, L::GZero, L::G2],
        CaseTag::Arctan => &[L::G, L::G3],
        CaseTag::Constant => &[L::G, L::G41, L::G42, L::G43],
    };
    let rho = rho.or(Some(0.0)).filter(|_| case == CaseTag::Power);
    let nu = nu.or(Some(0.0)).filter(|_| case == CaseTag::Arctan);
    labels
        .iter()
        .map(|&l| {
            SubalgebraSpec::new(case, l, 0.0, 1, rho, nu).expect("optimal system members are valid")
        })
        .collect()
}

/// Form of the ansatz and reduced equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reduction {
    /// `ω = t`, `u = φ + x/(t+a)`, `(ω+a)φ′ + φ = 0`.
    Galilean { a: f64 },
    /// `ω = x t^{−(ρ+1)/5}`, `u = t^{(ρ−4)/5} φ`.
    Power { rho: f64 },
    /// `ω = x − a ln t`, `u = φ/t`.
    Logarithmic { a: f64 },
    /// `ω = x e^{−t/5}`, `u = e^{t/5} φ`.
    Exponential,
    /// `ω = x e^{−ν arctan t}/√(t²+1)`.
    Arctan { nu: f64 },
    /// `ω = x`, `u = φ`.
    Stationary,
    /// `ω = x + σt²/2`, `u = φ − σt`, `φ⁽⁵⁾ = −φφ′ + σ`.
    Accelerated { sigma: f64 },
}

/// Ansatz, invariant and reduced ODE of one subalgebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionRecipe {
    pub subalgebra: SubalgebraSpec,
    pub kind: Reduction,
}

/// Build the reduction of a subalgebra.
pub fn build_reduction(s: &SubalgebraSpec) -> Result<ReductionRecipe> {
    use SubalgebraLabel as L;
    let kind = match s.label {
        L::G => {
            return Err(Error::Unsupported(
                "reduction by <Dx> yields constant solutions only".into(),
            ))
        }
        L::G43 => {
            return Err(Error::Unsupported(
                "g4.3 coincides with g1.1 at rho = 0; use case 1 with rho 0".into(),
            ))
        }
        L::GA => Reduction::Galilean { a: s.a },
        L::GSigma => Reduction::Galilean { a: s.sigma as f64 },
        L::GZero => Reduction::Galilean { a: 0.0 },
        L::G11 => Reduction::Power {
            rho: s.rho.unwrap_or(0.0),
        },
        L::G12 => Reduction::Logarithmic { a: s.a },
        L::G2 => Reduction::Exponential,
        L::G3 => Reduction::Arctan {
            nu: s.nu.unwrap_or(0.0),
        },
        L::G41 => Reduction::Stationary,
        L::G42 => {
            if s.sigma == 0 {
                return Err(Error::Unsupported(
                    "g4.2 with sigma = 0 is the Galilean kernel element; use ga".into(),
                ));
            }
            Reduction::Accelerated {
                sigma: s.sigma as f64,
            }
        }
    };
    Ok(ReductionRecipe {
        subalgebra: s.clone(),
        kind,
    })
}

impl ReductionRecipe {
    pub fn order(&self) -> usize {
        match self.kind {
            Reduction::Galilean { .. } => 1,
            _ => 5,
        }
    }

    /// Representative equation (`α = 0`) on `interval`.
    pub fn equation(&self, interval: (f64, f64)) -> Result<EquationSpec> {
        EquationSpec::with_beta(self.subalgebra.beta(interval)?)
    }

    /// Similarity variable.
    pub fn omega(&self, t: Jet, x: Jet) -> Jet {
        match self.kind {
            Reduction::Galilean { .. } => t,
            Reduction::Power { rho } => x * t.powf(-(rho + 1.0) / 5.0),
            Reduction::Logarithmic { a } => x - t.ln() * a,
            Reduction::Exponential => x * (t * -0.2).exp(),
            Reduction::Arctan { nu } => x * (t.atan() * -nu).exp() / (t * t + 1.0).sqrt(),
            Reduction::Stationary => x,
            Reduction::Accelerated { sigma } => x + t * t * (0.5 * sigma),
        }
    }

    /// `u` from `φ(ω(t, x))`.
    pub fn ansatz(&self, t: Jet, x: Jet, phi: Jet) -> Jet {
        match self.kind {
            Reduction::Galilean { a } => phi + x / (t + a),
            Reduction::Power { rho } => t.powf((rho - 4.0) / 5.0) * phi,
            Reduction::Logarithmic { .. } => phi / t,
            Reduction::Exponential => (t * 0.2).exp() * phi,
            Reduction::Arctan { nu } => {
                let r2 = t * t + 1.0;
                (t.atan() * nu).exp() / r2.sqrt() * phi + x * t / r2
            }
            Reduction::Stationary => phi,
            Reduction::Accelerated { sigma } => phi - t * sigma,
        }
    }

    /// `φ⁽⁵⁾` from the reduced equation (order-5 recipes).
    pub fn rhs(&self, w: f64, y: &State) -> f64 {
        let (p, dp) = (y[0], y[1]);
        match self.kind {
            Reduction::Galilean { .. } => f64::NAN,
            Reduction::Power { rho } => -(p - (rho + 1.0) / 5.0 * w) * dp - (rho - 4.0) / 5.0 * p,
            Reduction::Logarithmic { a } => -(p - a) * dp + p,
            Reduction::Exponential => -(p - w / 5.0) * dp - p / 5.0,
            Reduction::Arctan { nu } => -(p - nu * w) * dp - nu * p - w,
            Reduction::Stationary => -p * dp,
            Reduction::Accelerated { sigma } => -p * dp + sigma,
        }
    }

    /// Left side of the reduced ODE for `φ, …, φ⁽⁵⁾` at `ω`.
    pub fn ode_residual(&self, w: f64, d: &[f64; 6]) -> f64 {
        match self.kind {
            Reduction::Galilean { a } => (w + a) * d[1] + d[0],
            _ => d[5] - self.rhs(w, &[d[0], d[1], d[2], d[3], d[4]]),
        }
    }

    /// Factor `M(t)` with `PDE residual = M(t) · ODE residual`.
    pub fn multiplier(&self, t: f64) -> f64 {
        match self.kind {
            Reduction::Galilean { a } => 1.0 / (t + a),
            Reduction::Power { rho } => t.powf((rho - 9.0) / 5.0),
            Reduction::Logarithmic { .. } => t.powi(-2),
            Reduction::Exponential => (t / 5.0).exp(),
            Reduction::Arctan { nu } => (nu * t.atan()).exp() / (t * t + 1.0).powf(1.5),
            Reduction::Stationary | Reduction::Accelerated { .. } => 1.0,
        }
    }

    pub fn omega_text(&self) -> String {
        match self.kind {
            Reduction::Galilean { .. } => "t".into(),
            Reduction::Power { rho } => format!("x*t^(-{:?})", (rho + 1.0) / 5.0),
            Reduction::Logarithmic { a } => format!("x - {a:?}*ln(t)"),
            Reduction::Exponential => "x*exp(-t/5)".into(),
            Reduction::Arctan { nu } => format!("x*exp(-{nu:?}*atan(t))/sqrt(t^2+1)"),
            Reduction::Stationary => "x".into(),
            Reduction::Accelerated { sigma } => format!("x + {:?}*t^2", 0.5 * sigma),
        }
    }

    pub fn ansatz_text(&self) -> String {
        match self.kind {
            Reduction::Galilean { a } => format!("phi(omega) + x/(t + {a:?})"),
            Reduction::Power { rho } => format!("t^({:?})*phi(omega)", (rho - 4.0) / 5.0),
            Reduction::Logarithmic { .. } => "phi(omega)/t".into(),
            Reduction::Exponential => "exp(t/5)*phi(omega)".into(),
            Reduction::Arctan { nu } => {
                format!("exp({nu:?}*atan(t))/sqrt(t^2+1)*phi(omega) + x*t/(t^2+1)")
            }
            Reduction::Stationary => "phi(omega)".into(),
            Reduction::Accelerated { sigma } => format!("phi(omega) - {sigma:?}*t"),
        }
    }

    pub fn ode_text(&self) -> String {
        match self.kind {
            Reduction::Galilean { a } => format!("(omega + {a:?})*phi' + phi = 0"),
            Reduction::Power { rho } => format!(
                "phi''''' = -(phi - {:?}*omega)*phi' - ({:?})*phi",
                (rho + 1.0) / 5.0,
                (rho - 4.0) / 5.0
            ),
            Reduction::Logarithmic { a } => format!("phi''''' = -(phi - {a:?})*phi' + phi"),
            Reduction::Exponential => "phi''''' = -(phi - omega/5)*phi' - phi/5".into(),
            Reduction::Arctan { nu } => {
                format!("phi''''' = -(phi - {nu:?}*omega)*phi' - {nu:?}*phi - omega")
            }
            Reduction::Stationary => "phi''''' = -phi*phi'".into(),
            Reduction::Accelerated { sigma } => format!("phi''''' = -phi*phi' + {sigma:?}"),
        }
    }

    /// `u` as Taylor jets in `x` (at fixed `t`) and in `t` (at fixed `x`),
    /// for a profile given on jets of `ω`.
    fn u_jets(&self, t: f64, x: f64, profile: &dyn Fn(Jet) -> Jet) -> (Jet, Jet) {
        let in_x = {
            let (tj, xj) = (Jet::constant(t), Jet::var(x));
            self.ansatz(tj, xj, profile(self.omega(tj, xj)))
        };
        let in_t = {
            let (tj, xj) = (Jet::var(t), Jet::constant(x));
            self.ansatz(tj, xj, profile(self.omega(tj, xj)))
        };
        (in_x, in_t)
    }

    /// PDE residual of the field built from `profile`, by exact
    /// differentiation.
    pub fn pde_residual(
        &self,
        eq: &EquationSpec,
        t: f64,
        x: f64,
        profile: &dyn Fn(Jet) -> Jet,
    ) -> f64 {
        let (ux, ut) = self.u_jets(t, x, profile);
        let u = ux.value();
        ut.d1() + u * ux.d1() + eq.alpha().value(t) * u + eq.beta().value(t) * ux.d(5)
    }

    pub fn omega_at(&self, t: f64, x: f64) -> f64 {
        self.omega(Jet::constant(t), Jet::constant(x)).value()
    }

    /// Largest `|R_pde − M·R_ode|` over `points` for a test profile, which
    /// certifies the reduced equation against the ansatz. Also returns the
    /// largest `|R_pde|` for scale.
    pub fn certify(
        &self,
        eq: &EquationSpec,
        points: &[(f64, f64)],
        profile: &dyn Fn(Jet) -> Jet,
    ) -> (f64, f64) {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for &(t, x) in points {
            let r_pde = self.pde_residual(eq, t, x, profile);
            let w = self.omega_at(t, x);
            let pj = profile(Jet::var(w));
            let d: [f64; 6] = std::array::from_fn(|k| pj.d(k));
            let r_ode = self.ode_residual(w, &d);
            let diff = r_pde - self.multiplier(t) * r_ode;
            worst = worst.max(if diff.is_finite() {
                diff.abs()
            } else {
                f64::INFINITY
            });
            scale = scale.max(r_pde.abs());
        }
        (worst, scale)
    }

    /// Solve the reduced equation. The first-order reduction is solved in
    /// closed form from `ic[0] = φ(ω0)`.
    pub fn integrate(
        &self,
        w0: f64,
        ic: State,
        span: (f64, f64),
        tol: Tolerances,
    ) -> Result<OdeTrajectory> {
        match self.kind {
            Reduction::Galilean { a } => {
                if w0 + a == 0.0 {
                    return Err(Error::Invalid("ω0 sits on the pole ω = −a".into()));
                }
                OdeTrajectory::reciprocal(a, ic[0] * (w0 + a), span, 65)
            }
            _ => integrate(&|w, y| self.rhs(w, y), w0, ic, span, tol),
        }
    }
}

/// Field assembled from a trajectory on a space-time window.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    /// Left end of the spatial window; samples sit at `x0 + grid.x(j)`.
    pub x0: f64,
    pub grid: Grid1D,
    pub series: Vec<Field>,
    /// Max PDE residual by exact differentiation of the dense output.
    pub residual: f64,
}

/// Evaluate the ansatz on `x0 + grid` at the times `ts`.
pub fn reconstruct(
    r: &ReductionRecipe,
    traj: &OdeTrajectory,
    eq: &EquationSpec,
    grid: &Grid1D,
    x0: f64,
    ts: &[f64],
) -> Result<Reconstruction> {
    let xs: Vec<f64> = grid.points().into_iter().map(|x| x + x0).collect();
    let (mut wmin, mut wmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &t in ts {
        for &x in &xs {
            let w = r.omega_at(t, x);
            wmin = wmin.min(w);
            wmax = wmax.max(w);
        }
    }
    if !(traj.contains(wmin) && traj.contains(wmax)) {
        return Err(Error::OffGrid(format!(
            "window t in [{}, {}], x in [{}, {}] needs omega in [{wmin}, {wmax}], trajectory covers [{}, {}]",
            ts.iter().cloned().fold(f64::INFINITY, f64::min),
            ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            xs[0],
            xs[xs.len() - 1],
            traj.span.0,
            traj.span.1
        )));
    }
    let profile = |w: Jet| traj.compose(w);
    let mut residual: f64 = 0.0;
    let mut series = Vec::with_capacity(ts.len());
    for &t in ts {
        let mut values = Vec::with_capacity(xs.len());
        for &x in &xs {
            let tj = Jet::constant(t);
            let xj = Jet::constant(x);
            values.push(r.ansatz(tj, xj, profile(r.omega(tj, xj))).value());
            let res = r.pde_residual(eq, t, x, &profile);
            residual = residual.max(if res.is_finite() {
                res.abs()
            } else {
                f64::INFINITY
            });
        }
        series.push(Field::new(t, values)?);
    }
    Ok(Reconstruction {
        x0,
        grid: *grid,
        series,
        residual,
    })
}

/// `e^{−ω²}` on jets, the default certification profile.
pub fn gaussian(w: Jet) -> Jet {
    (-(w * w)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recipe(
        case: CaseTag,
        label: &str,
        a: f64,
        sigma: i8,
        rho: Option<f64>,
        nu: Option<f64>,
    ) -> ReductionRecipe {
        let s = SubalgebraSpec::new(
            case,
            SubalgebraLabel::parse(label).unwrap(),
            a,
            sigma,
            rho,
            nu,
        )
        .unwrap();
        build_reduction(&s).unwrap()
    }

    #[test]
    fn optimal_system_rows() {
        let names = |v: Vec<SubalgebraSpec>| v.iter().map(|s| s.label.name()).collect::<Vec<_>>();
        assert_eq!(
            names(optimal_system(CaseTag::Generic, None, None)),
            ["g", "ga"]
        );
        assert_eq!(
            names(optimal_system(CaseTag::Constant, None, None)),
            ["g", "g4.1", "g4.2", "g4.3"]
        );
        assert_eq!(
            names(optimal_system(CaseTag::Arctan, None, Some(0.3))),
            ["g", "g3"]
        );
        assert_eq!(
            names(optimal_system(CaseTag::Power, Some(-1.0), None)),
            ["g", "gsigma", "g1.2"]
        );
    }

    #[test]
    fn rejected_subalgebras() {
        let g =
            SubalgebraSpec::new(CaseTag::Constant, SubalgebraLabel::G, 0.0, 1, None, None).unwrap();
        assert!(build_reduction(&g).is_err());
        let g43 = SubalgebraSpec::new(CaseTag::Constant, SubalgebraLabel::G43, 0.0, 1, None, None)
            .unwrap();
        assert!(build_reduction(&g43).is_err());
        let s0 = SubalgebraSpec::new(CaseTag::Constant, SubalgebraLabel::G42, 0.0, 0, None, None)
            .unwrap();
        assert!(build_reduction(&s0).is_err());
        assert!(SubalgebraSpec::new(
            CaseTag::Exponential,
            SubalgebraLabel::G41,
            0.0,
            1,
            None,
            None
        )
        .is_err());
    }

    #[test]
    fn generators_are_symmetries() {
        use crate::symmetry::determining_residuals;
        let iv = (0.5, 2.0);
        for case in [CaseTag::Generic, CaseTag::Exponential, CaseTag::Constant] {
            for s in optimal_system(case, None, None) {
                let eq = EquationSpec::with_beta(s.beta(iv).unwrap()).unwrap();
                let r = determining_residuals(&s.generator.to_field(), &eq, 32).max();
                assert!(r < 1e-9, "{:?} {}: {r}", case, s.label);
            }
        }
        for rho in [0.5, -1.0] {
            for s in optimal_system(CaseTag::Power, Some(rho), None) {
                let eq = EquationSpec::with_beta(s.beta(iv).unwrap()).unwrap();
                assert!(determining_residuals(&s.generator.to_field(), &eq, 32).max() < 1e-9);
            }
        }
        for s in optimal_system(CaseTag::Arctan, None, Some(0.4)) {
            let eq = EquationSpec::with_beta(s.beta(iv).unwrap()).unwrap();
            assert!(determining_residuals(&s.generator.to_field(), &eq, 32).max() < 1e-8);
        }
        for sigma in [-1, 1] {
            let s = SubalgebraSpec::new(
                CaseTag::Constant,
                SubalgebraLabel::G42,
                0.0,
                sigma,
                None,
                None,
            )
            .unwrap();
            let eq = EquationSpec::with_beta(s.beta(iv).unwrap()).unwrap();
            assert!(determining_residuals(&s.generator.to_field(), &eq, 32).max() < 1e-12);
        }
    }

    #[test]
    fn optimal_system_examples() {
        let r = recipe(CaseTag::Power, "g1.1", 0.0, 1, Some(0.5), None);
        assert_eq!(
            r.ode_text(),
            "phi''''' = -(phi - 0.3*omega)*phi' - (-0.7)*phi"
        );
        assert!((r.omega_at(4.0, 2.0) - 2.0 * 4f64.powf(-0.3)).abs() < 1e-14);
        let r = recipe(CaseTag::Constant, "g4.2", 0.0, 1, None, None);
        assert!((r.omega_at(2.0, 1.0) - 3.0).abs() < 1e-14);
        assert_eq!(r.rhs(0.0, &[0.0; 5]), 1.0);
    }

    #[test]
    fn ansatz_matches_reduced_equation() {
        let iv = (0.5, 2.0);
        let cases = [
            recipe(CaseTag::Generic, "ga", 0.7, 1, None, None),
            recipe(CaseTag::Power, "g1.1", 0.0, 1, Some(0.5), None),
            recipe(CaseTag::Power, "g1.1", 0.0, 1, Some(-2.5), None),
            recipe(CaseTag::Power, "g1.2", 0.3, 1, Some(-1.0), None),
            recipe(CaseTag::Exponential, "g2", 0.0, 1, None, None),
            recipe(CaseTag::Arctan, "g3", 0.0, 1, None, Some(0.4)),
            recipe(CaseTag::Constant, "g4.1", 0.0, 1, None, None),
            recipe(CaseTag::Constant, "g4.2", 0.0, 1, None, None),
            recipe(CaseTag::Constant, "g4.2", 0.0, -1, None, None),
        ];
        let pts: Vec<(f64, f64)> = (0..7)
            .flat_map(|i| (0..7).map(move |j| (0.6 + 0.2 * i as f64, -1.5 + 0.5 * j as f64)))
            .collect();
        for r in cases {
            let eq = r.equation(iv).unwrap();
            let (worst, scale) = r.certify(&eq, &pts, &gaussian);
            assert!(
                worst < 1e-9 * scale.max(1.0),
                "{:?}: {worst} (scale {scale})",
                r.kind
            );
        }
    }

    #[test]
    fn first_order_branch() {
        let r = recipe(CaseTag::Generic, "ga", 0.0, 1, None, None);
        let traj = r
            .integrate(
                1.0,
                [3.0, 0.0, 0.0, 0.0, 0.0],
                (1.0, 3.0),
                Tolerances::default(),
            )
            .unwrap();
        assert!((traj.value(3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_and_taylor_start() {
        let r = recipe(CaseTag::Constant, "g4.1", 0.0, 1, None, None);
        let traj = r
            .integrate(0.0, [0.0; 5], (0.0, 2.0), Tolerances::default())
            .unwrap();
        assert!(traj.values.iter().all(|y| y.iter().all(|v| *v == 0.0)));
        let r = recipe(CaseTag::Constant, "g4.2", 0.0, 1, None, None);
        let traj = r
            .integrate(0.0, [0.0; 5], (0.0, 0.5), Tolerances::default())
            .unwrap();
        for w in [0.05f64, 0.1, 0.2] {
            let want = w.powi(5) / 120.0;
            assert!((traj.value(w) - want).abs() < 1e-11, "{w}");
        }
    }

    #[test]
    fn reconstructed_field_residual_tracks_tolerance() {
        let r = recipe(CaseTag::Power, "g1.1", 0.0, 1, Some(0.5), None);
        let eq = r.equation((0.5, 2.0)).unwrap();
        let grid = Grid1D::new(4.0, 64).unwrap();
        let ts: Vec<f64> = (0..64).map(|i| 0.6 + 1.2 * i as f64 / 63.0).collect();
        let ic = [0.2, 0.0, -0.1, 0.0, 0.05];
        for rel in [1e-8, 1e-10, 1e-12] {
            let tol = Tolerances {
                rel,
                abs: rel * 1e-2,
            };
            let traj = r.integrate(0.0, ic, (-3.0, 3.0), tol).unwrap();
            let rec = reconstruct(&r, &traj, &eq, &grid, -2.0, &ts).unwrap();
            assert!(rec.residual < 10.0 * rel, "{rel}: {}", rec.residual);
        }
        let traj = r
            .integrate(0.0, ic, (-3.0, 3.0), Tolerances::default())
            .unwrap();
        assert!(reconstruct(&r, &traj, &eq, &grid, 10.0, &ts).is_err());
    }
}

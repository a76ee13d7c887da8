use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[cfg(test)]
use clap::CommandFactory;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};

/// Symmetry analysis and numerics for u_t + α(t)u + uu_x + β(t)u_xxxxx = 0.
///
/// Every command prints a JSON manifest (schema 1) that echoes its inputs,
/// so `--config manifest.json` reruns it. Exit codes: 1 invalid input,
/// 2 inconclusive classification, 3 numerical failure.
#[derive(Parser, Debug)]
#[command(name = "fkdv", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lie symmetry classification of one equation.
    Classify(ClassifyArgs),
    /// Similarity reduction to an ODE, solved and mapped back.
    Reduce(ReduceArgs),
    /// Pseudospectral solution on a periodic grid.
    Solve(SolveArgs),
    /// Closed-form solutions and their residuals.
    Exact(ExactArgs),
    /// Check a generator: determining equations, and optionally the flow of a stored solution.
    Verify(VerifyArgs),
    /// Equivalence transformations between members of the class.
    Transform(TransformArgs),
}

/// Closed interval written `lo:hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Span(pub f64, pub f64);

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("empty or non-finite interval {lo}:{hi}"));
        }
        Ok(Span(lo, hi))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.0, self.1)
    }
}

impl Serialize for Span {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Span {
    pub fn pair(self) -> (f64, f64) {
        (self.0, self.1)
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("`{s}`: {e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Output {
    /// TOML file, or a manifest.json from an earlier run, supplying flag
    /// values. Flags given on the command line take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Directory that receives manifest.json and the data files.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// What goes to stdout: the JSON manifest or the main CSV table.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EquationArgs {
    /// Damping α(t), an expression in t (ops + - * / ^; exp ln sin cos atan sqrt abs; pi, e).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub alpha: String,
    /// Dispersion β(t), an expression in t. Required.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Working time interval lo:hi (time units).
    #[arg(long, default_value = "1:2", allow_hyphen_values = true)]
    pub t_range: Span,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub eq: EquationArgs,
    /// Sample points for the classifying equation.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Relative singular-value threshold for the null-space rank.
    #[arg(long, default_value_t = 1e-8, value_parser = positive)]
    pub svd_tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReduceArgs {
    /// Classification case: 0 generic, 1 power, 2 exponential, 3 arctan, 4 constant.
    #[arg(long)]
    pub case: Option<u8>,
    /// Subalgebra label (g, ga, gsigma, g0, g1.1, g1.2, g2, g3, g4.1, g4.2). Defaults to the first reducing member of the case.
    #[arg(long)]
    pub subalgebra: Option<String>,
    /// Free constant of the ga and g1.2 families.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    /// Sign selector σ ∈ {-1, 0, 1}.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sigma: i8,
    /// Power exponent ρ (case 1).
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    /// Arctan parameter ν (case 3).
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    /// Initial values φ, φ', φ'', φ''', φ'''' at ω0 for the fifth-order reductions.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0,0,0,0,0"
    )]
    pub ic: Vec<f64>,
    /// φ(ω0) for the first-order reduction.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub phi0: f64,
    /// Start of integration ω0. Defaults to the left end of --span.
    #[arg(long, allow_hyphen_values = true)]
    pub w0: Option<f64>,
    /// Integration range of ω, lo:hi.
    #[arg(long, default_value = "0:2", allow_hyphen_values = true)]
    pub span: Span,
    /// Relative tolerance of the adaptive integrator.
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    pub rtol: f64,
    /// Absolute tolerance of the adaptive integrator.
    #[arg(long, default_value_t = 1e-12, value_parser = positive)]
    pub atol: f64,
    /// Time window for reconstructing u(t, x), lo:hi.
    #[arg(long, default_value = "1:2", allow_hyphen_values = true)]
    pub t_range: Span,
    /// Spatial points per reconstructed snapshot.
    #[arg(long, default_value_t = 32)]
    pub x_points: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub eq: EquationArgs,
    /// Initial profile u(t0, x), an expression in x. Must be periodic on the box.
    #[arg(long, default_value = "0.1*sin(x)", allow_hyphen_values = true)]
    pub u0: String,
    /// Period of the box (space units).
    #[arg(long, default_value_t = std::f64::consts::TAU, value_parser = positive)]
    pub length: f64,
    /// Grid points, a power of two ≥ 16.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Largest time step; the run is split into equal steps.
    #[arg(long, default_value_t = 1e-3, value_parser = positive)]
    pub dt: f64,
    /// Start time. Defaults to the left end of --t-range.
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// End time. Defaults to the right end of --t-range.
    #[arg(long, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    /// Steps between stored snapshots.
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
    /// Keep all modes in the quadratic term instead of 2/3 truncation.
    #[arg(long)]
    pub no_dealias: bool,
    /// Weight of (u_xx)² in the third monitored density. Defaults to 3β(t).
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactKind {
    /// cn⁴ travelling wave at modulus √2/2, with β fixed by the parameters.
    Cn4,
    /// x-affine rational solution valid for every β.
    Degenerate,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExactArgs {
    #[arg(value_enum)]
    #[serde(skip)]
    pub kind: ExactKind,
    /// Damping α(t), an expression in t.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub alpha: String,
    /// Dispersion β(t) for the degenerate solution (ignored by cn4).
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub beta: String,
    /// Working time interval lo:hi.
    #[arg(long, default_value = "1:2", allow_hyphen_values = true)]
    pub t_range: Span,
    /// cn4: amplitude scale (> 0). degenerate: shift in the denominator.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a: f64,
    /// cn4: phase shift. degenerate: additive constant.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub b: f64,
    /// cn4: space shift.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub d: f64,
    /// cn4: slope of the gauged time Z = c1∫e^{-A} + c2.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c1: f64,
    /// cn4: offset of the gauged time.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub c2: f64,
    /// Report the PDE residual by exact differentiation.
    #[arg(long)]
    pub check: bool,
    /// Snapshots written across --t-range.
    #[arg(long, default_value_t = 3)]
    pub snapshots: usize,
    /// Spatial periods in the sampling box (cn4).
    #[arg(long, default_value_t = 1)]
    pub periods: usize,
    /// Grid points of the sampling box, a power of two ≥ 16.
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Rk4,
    Euler,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub eq: EquationArgs,
    /// Generator constants c0..c5 of (c2t²+c1t+c0)∂t + ((c2t+c3)x+c4t+c5)∂x + ((c3−c1−c2t)u+c2x+c4)∂u, taken in gauged variables when α ≠ 0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub generator: Vec<f64>,
    /// Grid CSV (t,x,u) from `solve`, pushed along the generator.
    #[arg(long, value_name = "FILE")]
    pub solution: Option<PathBuf>,
    /// Group parameter ε of the push.
    #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
    pub eps: f64,
    /// Approximation of the flow.
    #[arg(long, value_enum, default_value_t = Scheme::Rk4)]
    pub scheme: Scheme,
    /// RK4 substeps per direction.
    #[arg(long, default_value_t = 4)]
    pub substeps: usize,
    /// Snapshots in the time interpolation stencil.
    #[arg(long, default_value_t = 6)]
    pub stencil: usize,
    /// Sample times for the determining equations.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    /// Gauge transformation to α = 0.
    Gauge,
    /// Map to constant coefficients when the criterion holds.
    ReduceToConstant,
    /// Apply an element of the α = 0 equivalence group.
    Apply,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TransformArgs {
    #[arg(value_enum)]
    #[serde(skip)]
    pub kind: TransformKind,
    #[command(flatten)]
    #[serde(flatten)]
    pub eq: EquationArgs,
    /// Threshold of the reducibility statistic.
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    pub tol: f64,
    /// Group element a,b,c,d,e0,e1,e2 for `apply`: t̃ = (at+b)/(ct+d), x̃ = (e2 x + e1 t + e0)/(ct+d).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub element: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

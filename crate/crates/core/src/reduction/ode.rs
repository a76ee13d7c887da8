//! Dormand–Prince 5(4) for `φ⁽⁵⁾ = F(ω, φ, …, φ⁗)` with continuous
//! extension on every accepted step.

use crate::error::{Error, Result};
use crate::jet::{Jet, LEN};

pub type State = [f64; 5];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Dense-output weights of the continuous extension.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Fourth-order interpolant of one accepted step, for every component.
#[derive(Clone, Debug)]
struct Segment {
    /// Left end in `ω`, for lookup.
    lo: f64,
    start: f64,
    /// Signed step.
    h: f64,
    r: [State; 5],
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Segment {
    fn new(start: f64, h: f64, y: &State, y1: &State, k: &[State; 7]) -> Self {
        let mut r = [[0.0; 5]; 5];
        for i in 0..5 {
            let diff = y1[i] - y[i];
            let bspl = h * k[0][i] - diff;
            r[0][i] = y[i];
            r[1][i] = diff;
            r[2][i] = bspl;
            r[3][i] = diff - h * k[6][i] - bspl;
            r[4][i] = h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>();
        }
        Segment {
            lo: start.min(start + h),
            start,
            h,
            r,
        }
    }

    /// `φ, …, φ⁗` from the interpolant, and `φ⁽⁵⁾` as the derivative of
    /// the `φ⁗` component.
    fn derivatives(&self, w: f64) -> [f64; 6] {
        let th = (w - self.start) / self.h;
        let th1 = 1.0 - th;
        let r = &self.r;
        let mut out = [0.0; 6];
        for (i, slot) in out.iter_mut().take(5).enumerate() {
            *slot = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        let s = r[3][4] + th1 * r[4][4];
        let ds = -r[4][4];
        let rr = r[2][4] + th * s;
        let drr = s + th * ds;
        let q = r[1][4] + th1 * rr;
        let dq = -rr + th1 * drr;
        out[5] = (q + th * dq) / self.h;
        out
    }
}

#[derive(Clone, Debug)]
enum Dense {
    Steps(Vec<Segment>),
    /// `φ = c/(ω + a)`.
    Reciprocal {
        a: f64,
        c: f64,
    },
}

/// Solution of a reduced ODE with dense output over `span`.
#[derive(Clone, Debug)]
pub struct OdeTrajectory {
    pub nodes: Vec<f64>,
    /// `(φ, φ′, φ″, φ‴, φ⁗)` at the nodes.
    pub values: Vec<State>,
    pub stats: IntegratorStats,
    pub tol: Tolerances,
    pub span: (f64, f64),
    dense: Dense,
}

impl OdeTrajectory {
    /// Exact solution `φ = c/(ω+a)` of the first-order reduction, sampled
    /// at `samples` nodes.
    pub fn reciprocal(a: f64, c: f64, span: (f64, f64), samples: usize) -> Result<Self> {
        let (lo, hi) = (span.0.min(span.1), span.0.max(span.1));
        if lo <= -a && -a <= hi {
            return Err(Error::BlowUp {
                at: -a,
                msg: "pole of c/(ω + a) inside the span".into(),
            });
        }
        let dense = Dense::Reciprocal { a, c };
        let nodes: Vec<f64> = (0..samples.max(2))
            .map(|i| lo + (hi - lo) * i as f64 / (samples.max(2) - 1) as f64)
            .collect();
        let mut out = OdeTrajectory {
            nodes: nodes.clone(),
            values: Vec::new(),
            stats: IntegratorStats::default(),
            tol: Tolerances { rel: 0.0, abs: 0.0 },
            span: (lo, hi),
            dense,
        };
        out.values = nodes
            .iter()
            .map(|&w| {
                let d = out.derivatives(w);
                [d[0], d[1], d[2], d[3], d[4]]
            })
            .collect();
        Ok(out)
    }

    pub fn contains(&self, w: f64) -> bool {
        let slack = 1e-12 * (self.span.1 - self.span.0).abs().max(1.0);
        w >= self.span.0 - slack && w <= self.span.1 + slack
    }

    /// `φ, …, φ⁽⁵⁾` at `ω` from the dense output.
    pub fn derivatives(&self, w: f64) -> [f64; 6] {
        match &self.dense {
            Dense::Reciprocal { a, c } => std::array::from_fn(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * factorial(k) * c / (w + a).powi(k as i32 + 1)
            }),
            Dense::Steps(segs) => {
                let i = match segs.binary_search_by(|s| s.lo.total_cmp(&w)) {
                    Ok(i) => i,
                    Err(0) => 0,
                    Err(i) => i - 1,
                };
                segs[i.min(segs.len() - 1)].derivatives(w)
            }
        }
    }

    pub fn value(&self, w: f64) -> f64 {
        self.derivatives(w)[0]
    }

    /// `φ` composed with an expansion of `ω`.
    pub fn compose(&self, w: Jet) -> Jet {
        let d = self.derivatives(w.value());
        let mut c = [0.0; LEN];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = d[k] / factorial(k);
        }
        w.compose(&Jet::from_coeffs(c))
    }
}

fn weighted_norm(err: &State, y0: &State, y1: &State, tol: Tolerances) -> f64 {
    let s: f64 = (0..5)
        .map(|i| {
            let sc = tol.abs + tol.rel * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (s / 5.0).sqrt()
}

fn field(f: &dyn Fn(f64, &State) -> f64, w: f64, y: &State) -> State {
    [y[1], y[2], y[3], y[4], f(w, y)]
}

/// Integrate from `w0` to `w1` (either direction).
fn integrate_one_way(
    f: &dyn Fn(f64, &State) -> f64,
    w0: f64,
    y0: State,
    w1: f64,
    tol: Tolerances,
    stats: &mut IntegratorStats,
) -> Result<(Vec<f64>, Vec<State>, Vec<Segment>)> {
    let dir = (w1 - w0).signum();
    let mut nodes = vec![w0];
    let mut values = vec![y0];
    let mut segs = Vec::new();
    if w1 == w0 {
        return Ok((nodes, values, segs));
    }
    let mut w = w0;
    let mut y = y0;
    let mut k0 = field(f, w, &y);
    stats.evaluations += 1;
    let span = (w1 - w0).abs();
    let mut h = {
        let d0 = weighted_norm(&y, &y, &y, tol);
        let d1 = weighted_norm(&k0, &y, &y, tol);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0.min(span).max(1e-12 * span.max(1.0))
    };
    let h_min = 1e-13 * w0.abs().max(w1.abs()).max(1.0);
    loop {
        let remaining = (w1 - w) * dir;
        if remaining <= h_min {
            break;
        }
        h = h.min(remaining);
        let mut k = [[0.0; 5]; 7];
        k[0] = k0;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..5 {
                    ys[i] += dir * h * A[s][j] * kj[i];
                }
            }
            k[s] = field(f, w + dir * h * C[s], &ys);
        }
        stats.evaluations += 6;
        let mut y1 = y;
        for i in 0..5 {
            y1[i] += dir * h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>();
        }
        let k1 = field(f, w + dir * h, &y1);
        let mut err = [0.0; 5];
        for i in 0..5 {
            err[i] = dir * h * (0..6).map(|j| E[j] * k[j][i]).sum::<f64>() + dir * h * E[6] * k1[i];
        }
        // Error per unit step: the dense output feeds fifth derivatives, whose
        // interpolation error scales like the local error over h.
        let en = weighted_norm(&err, &y, &y1, tol) / h.min(1.0);
        if !en.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            stats.rejected += 1;
            h *= 0.2;
            if h < h_min {
                return Err(Error::BlowUp {
                    at: w,
                    msg: "non-finite state; step size underflow".into(),
                });
            }
            continue;
        }
        if en <= 1.0 {
            let w_new = if remaining - h <= h_min {
                w1
            } else {
                w + dir * h
            };
            k[6] = k1;
            segs.push(Segment::new(w, w_new - w, &y, &y1, &k));
            w = w_new;
            y = y1;
            k0 = k1;
            nodes.push(w);
            values.push(y);
            stats.accepted += 1;
            if y.iter().any(|v| v.abs() > 1e15) {
                return Err(Error::BlowUp {
                    at: w,
                    msg: "solution exceeds 1e15".into(),
                });
            }
            let fac = if en == 0.0 {
                5.0
            } else {
                (0.9 * en.powf(-0.25)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            stats.rejected += 1;
            h *= (0.9 * en.powf(-0.25)).clamp(0.2, 1.0);
            if h < h_min {
                return Err(Error::BlowUp {
                    at: w,
                    msg: "step size underflow".into(),
                });
            }
        }
    }
    Ok((nodes, values, segs))
}

/// Solve `φ⁽⁵⁾ = f(ω, φ, …, φ⁗)` with `y(w0) = y0` over `span`, which must
/// contain `w0`; integration runs outward in both directions as needed.
pub fn integrate(
    f: &dyn Fn(f64, &State) -> f64,
    w0: f64,
    y0: State,
    span: (f64, f64),
    tol: Tolerances,
) -> Result<OdeTrajectory> {
    let (lo, hi) = (span.0.min(span.1), span.0.max(span.1));
    if !(lo.is_finite() && hi.is_finite()) || !(lo <= w0 && w0 <= hi) || lo == hi {
        return Err(Error::Invalid(format!(
            "span [{lo}, {hi}] must be finite, nonempty and contain ω0 = {w0}"
        )));
    }
    if !(tol.rel > 0.0 && tol.abs >= 0.0) {
        return Err(Error::Invalid("tolerances must be positive".into()));
    }
    if !f(w0, &y0).is_finite() {
        return Err(Error::Invalid(format!(
            "right-hand side is not finite at ω0 = {w0}"
        )));
    }
    let mut stats = IntegratorStats::default();
    let (bn, bv, mut bs) = integrate_one_way(f, w0, y0, lo, tol, &mut stats)?;
    let (fn_, fv, fs) = integrate_one_way(f, w0, y0, hi, tol, &mut stats)?;
    let mut nodes: Vec<f64> = bn.into_iter().rev().collect();
    let mut values: Vec<State> = bv.into_iter().rev().collect();
    nodes.pop();
    values.pop();
    nodes.extend(fn_);
    values.extend(fv);
    bs.reverse();
    bs.extend(fs);
    Ok(OdeTrajectory {
        nodes,
        values,
        stats,
        tol,
        span: (lo, hi),
        dense: Dense::Steps(bs),
    })
}

/// Trajectory as CSV `omega,phi,dphi,d2phi,d3phi,d4phi`.
pub fn write_trajectory_csv(out: &mut impl std::io::Write, traj: &OdeTrajectory) -> Result<()> {
    let io = |e: std::io::Error| Error::Invalid(format!("i/o: {e}"));
    writeln!(out, "omega,phi,dphi,d2phi,d3phi,d4phi").map_err(io)?;
    for (w, y) in traj.nodes.iter().zip(&traj.values) {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            w, y[0], y[1], y[2], y[3], y[4]
        )
        .map_err(io)?;
    }
    Ok(())
}

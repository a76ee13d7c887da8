//! The solution `u = (x + b) e^{−A}/(T + a)` valid for every `α` and `β`.

use crate::equivalence::EquationSpec;
use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Clone, Debug)]
pub struct DegenerateSolution {
    eq: EquationSpec,
    pub a: f64,
    pub b: f64,
}

/// Build the solution on `eq`'s interval; fails if `T + a` vanishes there.
pub fn degenerate_solution(eq: &EquationSpec, a: f64, b: f64) -> Result<DegenerateSolution> {
    let (lo, hi) = eq.interval();
    let t = eq.gauge_time();
    let (d_lo, d_hi) = (t.value(lo) + a, t.value(hi) + a);
    // T is monotone, so a sign change at the ends brackets the pole.
    if d_lo * d_hi <= 0.0 {
        return Err(Error::Invalid(format!(
            "T(t) + a vanishes on [{lo}, {hi}] (values {d_lo} and {d_hi})"
        )));
    }
    Ok(DegenerateSolution {
        eq: eq.clone(),
        a,
        b,
    })
}

impl DegenerateSolution {
    pub fn equation(&self) -> &EquationSpec {
        &self.eq
    }

    fn jet_t(&self, t: f64, x: f64) -> Jet {
        self.eq.exp_neg_a().jet(t) / (self.eq.gauge_time().jet(t) + self.a) * (x + self.b)
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        (x + self.b) * self.eq.exp_neg_a().value(t) / (self.eq.gauge_time().value(t) + self.a)
    }

    /// `u_t + uu_x + αu + βu_xxxxx`; `u` is affine in `x`, so the
    /// dispersive term drops out.
    pub fn residual_at(&self, t: f64, x: f64) -> f64 {
        let u = self.value(t, x);
        let ux = self.eq.exp_neg_a().value(t) / (self.eq.gauge_time().value(t) + self.a);
        self.jet_t(t, x).d1() + u * ux + self.eq.alpha().value(t) * u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_any_damping() {
        for alpha in ["0", "0.4", "sin(t)", "t^2 - 1"] {
            let eq = EquationSpec::parse(alpha, "exp(t) + t", (0.0, 1.0)).unwrap();
            let s = degenerate_solution(&eq, 2.0, -0.5).unwrap();
            for (t, x) in [(0.1, 1.0), (0.5, -3.0), (0.9, 7.0)] {
                assert!(s.residual_at(t, x).abs() < 1e-12, "{alpha}");
            }
        }
    }

    #[test]
    fn pole_is_rejected() {
        let eq = EquationSpec::parse("0", "1", (0.0, 2.0)).unwrap();
        assert!(degenerate_solution(&eq, -1.0, 0.0).is_err());
        let s = degenerate_solution(&eq, 1.0, 0.0).unwrap();
        assert!((s.value(1.0, 4.0) - 2.0).abs() < 1e-15);
    }
}

use fkdv::elliptic::{elliptic_k, sn_cn_dn};
use fkdv::equivalence::{is_reducible_to_constant, EquationSpec, GZeroElement, HatGElement};
use fkdv::exprcalc::SmoothFn;
use fkdv::exprcalc::{parse, Expr, Func};
use fkdv::jet::Jet;
use fkdv::pdesolve::{Grid1D, Spectral};
use fkdv::symmetry::{classify, determining_residuals, kernel_algebra, ungauge};
use proptest::prelude::*;

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        (-3.0f64..3.0).prop_map(|v| Expr::Num((v * 100.0).round() / 100.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), 0u8..4).prop_map(|(a, n)| Expr::Pow(Box::new(a), n as f64)),
            inner
                .clone()
                .prop_map(|a| Expr::Call(Func::Sin, Box::new(a))),
            inner
                .clone()
                .prop_map(|a| Expr::Call(Func::Atan, Box::new(a))),
            inner.prop_map(|a| Expr::Call(Func::Exp, Box::new(Expr::Call(Func::Cos, Box::new(a))))),
        ]
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_expressions_parse_back(e in expr_strategy(), t in -2.0f64..2.0) {
        let back = parse(&e.to_string()).unwrap();
        prop_assert!(close(back.eval(t), e.eval(t), 1e-12), "{e} -> {back}");
    }

    #[test]
    fn symbolic_derivative_matches_jet(e in expr_strategy(), t in -2.0f64..2.0) {
        let jet = e.eval_scalar(Jet::var(t));
        prop_assert!(close(e.diff().eval(t), jet.d1(), 1e-9), "{e}");
        prop_assert!(close(e.diff().diff().eval(t), jet.d2(), 1e-8), "{e}");
    }

    #[test]
    fn jacobi_identities(u in -20.0f64..20.0, k in 0.0f64..0.999) {
        let (sn, cn, dn) = sn_cn_dn(u, k).unwrap();
        prop_assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12);
        prop_assert!((dn * dn + k * k * sn * sn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quarter_period_zero_of_cn(k in 0.0f64..0.99) {
        let big_k = elliptic_k(k).unwrap();
        let (sn, cn, _) = sn_cn_dn(big_k, k).unwrap();
        prop_assert!(cn.abs() < 1e-12);
        prop_assert!((sn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gzero_composition_acts_pointwise(
        p in prop::array::uniform7(-1.0f64..1.0),
        q in prop::array::uniform7(-1.0f64..1.0),
        t in 0.0f64..0.5, x in -1.0f64..1.0, u in -1.0f64..1.0,
    ) {
        let make = |v: [f64; 7]| GZeroElement::new(1.0 + v[0], v[1], 0.2 * v[2], 1.0 + 0.3 * v[3], v[4], v[5], 1.0 + 0.5 * v[6]);
        let (Ok(g1), Ok(g2)) = (make(p), make(q)) else { return Ok(()) };
        prop_assume!(g1.delta().abs() > 0.1 && g2.delta().abs() > 0.1);
        let g21 = g2.compose(&g1).unwrap();
        let (t1, x1, u1) = g1.map_point(t, x, u);
        prop_assume!((g2.c * t1 + g2.d).abs() > 0.1 && (g1.c * t + g1.d).abs() > 0.1);
        let two = g2.map_point(t1, x1, u1);
        let one = g21.map_point(t, x, u);
        prop_assert!(close(one.0, two.0, 1e-10));
        prop_assert!(close(one.1, two.1, 1e-10));
        prop_assert!(close(one.2, two.2, 1e-10));
        let back = g21.inverse().unwrap().map_point(one.0, one.1, one.2);
        prop_assert!(close(back.0, t, 1e-9) && close(back.1, x, 1e-9) && close(back.2, u, 1e-9));
    }

    #[test]
    fn gauge_removes_constant_damping(k in -1.0f64..1.0, r in -1.0f64..1.0) {
        let eq = EquationSpec::parse(&format!("{k}"), &format!("exp({r}*t)"), (0.0, 1.0)).unwrap();
        let image = HatGElement::gauge(&eq).unwrap().apply_to_coefficients(&eq).unwrap();
        for t in image.sample_points() {
            prop_assert!(image.alpha().value(t).abs() < 1e-10);
        }
    }

    #[test]
    fn kernel_is_admitted_by_every_member(c in prop::array::uniform3(0.1f64..2.0), k in -1.0f64..1.0) {
        let beta = format!("{} + {}*t + {}*sin(t)", c[0] + 1.0, c[1], 0.5 * c[2]);
        let eq = EquationSpec::parse(&format!("{k}*t"), &beta, (0.0, 2.0)).unwrap();
        // With damping the boost is carried back through the gauge.
        for g in kernel_algebra() {
            prop_assert!(determining_residuals(&ungauge(&eq, &g), &eq, 32).max() < 1e-10);
        }
    }

    #[test]
    fn power_exponent_is_recovered(rho in prop_oneof![-0.9f64..-0.1, 0.1f64..1.45]) {
        let beta = SmoothFn::parse(&format!("t^{rho}"), (1.0, 2.0)).unwrap();
        let c = classify(&beta).unwrap();
        prop_assert_eq!(c.extension_dim, 1);
        prop_assert!((c.rho.unwrap() - rho).abs() < 1e-6, "{:?} vs {}", c.rho, rho);
    }

    #[test]
    fn cubes_of_affine_maps_are_reducible(a in 0.5f64..3.0, b in 1.0f64..4.0) {
        let eq = EquationSpec::parse("0", &format!("({a}*t + {b})^3"), (0.0, 1.0)).unwrap();
        let rep = is_reducible_to_constant(&eq, 1e-6).unwrap();
        prop_assert!(rep.reducible);
        prop_assert!((rep.c1 - a).abs() < 1e-6 && (rep.c2 - b).abs() < 1e-6);
    }

    #[test]
    fn spectral_derivatives_are_exact_on_modes(m in 1i32..10, order in 1u32..6) {
        let grid = Grid1D::new(2.0 * std::f64::consts::PI, 32).unwrap();
        let sp = Spectral::new(grid);
        let u = grid.sample(|x| (m as f64 * x).sin());
        let du = sp.derivative(&u, order);
        let mf = m as f64;
        for (j, x) in grid.points().into_iter().enumerate() {
            let phase = mf * x + order as f64 * std::f64::consts::FRAC_PI_2;
            prop_assert!((du[j] - mf.powi(order as i32) * phase.sin()).abs() < 1e-8 * mf.powi(order as i32));
        }
    }
}

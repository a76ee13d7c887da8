//! Acceptance suite. Each test prints one PASS/FAIL line; run with
//! `cargo test -p fkdv-core --test acceptance -- --nocapture --test-threads=1`.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fkdv::elliptic::{elliptic_k, sn_cn_dn};
use fkdv::equivalence::{is_reducible_to_constant, EquationSpec, GZeroElement, HatGElement};
use fkdv::exactsol::{cn4_field, Cn4Field, Cn4Params};
use fkdv::exprcalc::SmoothFn;
use fkdv::pdesolve::{residual_of_fn, Field, Grid1D, Solver, SolverConfig, SpectralField};
use fkdv::reduction::{
    build_reduction, degenerate_solution, gaussian, SubalgebraLabel, SubalgebraSpec,
};
use fkdv::symmetry::{
    classify, determining_residuals, verify_invariance_by_flow, CaseTag, FlowScheme, Generator,
};

fn verdict(id: u32, title: &str, ok: bool, detail: String) {
    println!(
        "acceptance {id:>2} {}: {title} [{detail}]",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "acceptance {id} failed: {detail}");
}

fn beta(text: &str, iv: (f64, f64)) -> SmoothFn {
    SmoothFn::parse(text, iv).unwrap()
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

#[test]
fn a01_classification_cases() {
    let start = Instant::now();
    let cases: [(&str, (f64, f64), CaseTag, usize); 5] = [
        ("t^1.5", (0.5, 2.0), CaseTag::Power, 1),
        ("t^(-1)", (0.5, 2.0), CaseTag::Power, 1),
        ("exp(t)", (0.0, 1.0), CaseTag::Exponential, 1),
        (
            "(t^2+1)^1.5*exp(1.5*atan(t))",
            (-1.0, 1.0),
            CaseTag::Arctan,
            1,
        ),
        ("1", (0.0, 1.0), CaseTag::Constant, 2),
    ];
    let mut ok = true;
    let mut worst_param: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for (text, iv, case, dim) in cases {
        let b = beta(text, iv);
        let c = classify(&b).unwrap();
        ok &= c.case == case && c.extension_dim == dim;
        let param_err = match case {
            CaseTag::Power if text == "t^1.5" => (c.rho.unwrap() - 1.5).abs(),
            CaseTag::Power => (c.rho_raw.unwrap() + 1.0).abs(),
            CaseTag::Exponential => (c.rate.unwrap() - 1.0).abs(),
            CaseTag::Arctan => (c.nu.unwrap() - 0.3).abs(),
            _ => 0.0,
        };
        worst_param = worst_param.max(param_err);
        let eq = EquationSpec::with_beta(b).unwrap();
        for g in c.basis() {
            worst_res = worst_res.max(determining_residuals(&g.to_field(), &eq, 64).max());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= worst_param < 1e-6 && worst_res < 1e-9 && secs < 5.0;
    verdict(
        1,
        "classification of the five coefficient cases",
        ok,
        format!("param err {worst_param:.1e}, basis residual {worst_res:.1e}, {secs:.2} s"),
    );
}

#[test]
fn a02_generic_rejection() {
    let dims: Vec<usize> = ["exp(t) + t", "t^2 + 1"]
        .iter()
        .map(|t| classify(&beta(t, (0.5, 2.0))).unwrap().extension_dim)
        .collect();
    verdict(
        2,
        "generic coefficients keep only the kernel",
        dims.iter().all(|&d| d == 0),
        format!("extension dims {dims:?}"),
    );
}

#[test]
fn a03_reducibility() {
    let tol = 1e-6;
    let iv = (0.0, 1.0);
    let cubic =
        is_reducible_to_constant(&EquationSpec::parse("0", "(2*t+3)^3", iv).unwrap(), tol).unwrap();
    let damped = is_reducible_to_constant(
        &EquationSpec::parse("1", "exp(-t)*(1 - exp(-t) + 1)^3", iv).unwrap(),
        tol,
    )
    .unwrap();
    let expo =
        is_reducible_to_constant(&EquationSpec::parse("0", "exp(t)", iv).unwrap(), tol).unwrap();
    let power =
        is_reducible_to_constant(&EquationSpec::parse("0", "t^1.5", (0.5, 2.0)).unwrap(), tol)
            .unwrap();
    let fit = (cubic.c1 - 2.0)
        .abs()
        .max((cubic.c2 - 3.0).abs())
        .max((damped.c1 - 1.0).abs())
        .max((damped.c2 - 1.0).abs());
    let ok =
        cubic.reducible && damped.reducible && !expo.reducible && !power.reducible && fit < 1e-6;
    verdict(
        3,
        "reducibility to constant coefficients",
        ok,
        format!(
            "fit err {fit:.1e}; verdicts {} {} {} {}",
            cubic.reducible, damped.reducible, expo.reducible, power.reducible
        ),
    );
}

#[test]
fn a04_gauge() {
    let mut worst: f64 = 0.0;
    let mut alpha_zero = true;
    for k in [-1.0f64, 0.5] {
        for b in ["1", "t + 2"] {
            let eq = EquationSpec::parse(&k.to_string(), b, (0.0, 1.0)).unwrap();
            let g = HatGElement::gauge(&eq).unwrap();
            let image = g.apply_to_coefficients(&eq).unwrap();
            for i in 0..32 {
                let t = (i as f64 + 0.5) / 32.0;
                let tt = g.map_time(t);
                alpha_zero &= image.alpha().value(tt) == 0.0;
                let want = (k * t).exp() * eq.beta().value(t);
                worst = worst.max((image.beta().value(tt) - want).abs() / want.abs().max(1.0));
            }
        }
    }
    verdict(
        4,
        "gauge to zero damping",
        alpha_zero && worst < 1e-8,
        format!("alpha identically zero: {alpha_zero}, beta err {worst:.1e}"),
    );
}

#[test]
fn a05_ansatz_certification() {
    let iv = (0.5, 2.0);
    let spec = |case, label: SubalgebraLabel, a, sigma, rho, nu| {
        SubalgebraSpec::new(case, label, a, sigma, rho, nu).unwrap()
    };
    use SubalgebraLabel as L;
    let members = [
        spec(CaseTag::Generic, L::GA, 0.7, 1, None, None),
        spec(CaseTag::Power, L::GSigma, 0.0, -1, Some(1.5), None),
        spec(CaseTag::Power, L::G11, 0.0, 1, Some(1.5), None),
        spec(CaseTag::Power, L::G11, 0.0, 1, Some(-0.4), None),
        spec(CaseTag::Power, L::G12, 0.3, 1, Some(-1.0), None),
        spec(CaseTag::Exponential, L::GZero, 0.0, 1, None, None),
        spec(CaseTag::Exponential, L::G2, 0.0, 1, None, None),
        spec(CaseTag::Arctan, L::G3, 0.0, 1, None, Some(0.3)),
        spec(CaseTag::Constant, L::G41, 0.0, 1, None, None),
        spec(CaseTag::Constant, L::G42, 0.0, 1, None, None),
        spec(CaseTag::Constant, L::G42, 0.0, -1, None, None),
    ];
    let pts: Vec<(f64, f64)> = (0..9)
        .flat_map(|i| (0..9).map(move |j| (0.6 + 0.15 * i as f64, -1.6 + 0.4 * j as f64)))
        .collect();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for s in &members {
        let r = build_reduction(s).unwrap();
        let eq = r.equation(iv).unwrap();
        let (w, sc) = r.certify(&eq, &pts, &gaussian);
        worst = worst.max(w);
        scale = scale.max(sc);
    }
    verdict(
        5,
        "ansatz against reduced equation, every optimal system member",
        worst < 1e-6,
        format!(
            "{} members, max |R_pde - M R_ode| {worst:.1e} (max |R_pde| {scale:.1e})",
            members.len()
        ),
    );
}

fn cn4_const(a: f64, iv: (f64, f64)) -> Cn4Field {
    cn4_field(Cn4Params::new(SmoothFn::constant(0.0, iv), a, 0.0, 0.0, 0.0, -1.0).unwrap()).unwrap()
}

#[test]
fn a06_exact_solutions() {
    let mut degenerate: f64 = 0.0;
    for alpha in ["0", "1", "1/t"] {
        let eq = EquationSpec::parse(alpha, "exp(t) + t", (1.0, 3.0)).unwrap();
        let s = degenerate_solution(&eq, 1.0, 0.5).unwrap();
        for i in 0..11 {
            for j in 0..11 {
                let (t, x) = (1.0 + 0.2 * i as f64, -5.0 + j as f64);
                degenerate = degenerate.max(s.residual_at(t, x).abs());
            }
        }
    }

    let f = cn4_const(1.0, (0.0, 1.0));
    let g = f.matched_grid(1, 128).unwrap();
    let spectral = residual_of_fn(&|t, x| f.value(t, x), &g, f.equation(), 0.5, 1e-3, 3)
        .unwrap()
        .max;

    let f = cn4_const(0.1, (0.0, 1.0));
    let g = f.matched_grid(1, 128).unwrap();
    let solver = Solver::new(g, f.equation());
    let sol = solver
        .solve(&f.sample(&g, 0.0).unwrap(), &SolverConfig::new(0.01, 1.0))
        .unwrap();
    let advected = sol.last().max_diff(&f.sample(&g, 1.0).unwrap());

    verdict(
        6,
        "exact solutions",
        degenerate < 1e-8 && spectral < 1e-6 && advected < 1e-5 && sol.steps == 100,
        format!(
            "degenerate {degenerate:.1e}, cn4 spectral residual {spectral:.1e}, {} steps drift {advected:.1e}",
            sol.steps
        ),
    );
}

#[test]
fn a07_solver_convergence() {
    // Temporal order on the exact cn⁴ field: the integrating factor makes
    // pure linear dispersion exact, so the nonlinear field is the test.
    let f = cn4_const(0.1, (0.0, 1.0));
    let g = f.matched_grid(1, 128).unwrap();
    let solver = Solver::new(g, f.equation());
    let u0 = f.sample(&g, 0.0).unwrap();
    let exact = f.sample(&g, 0.5).unwrap();
    let dts = [0.01, 0.005, 0.0025, 0.00125];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let sol = solver.solve(&u0, &SolverConfig::new(dt, 0.5)).unwrap();
            sol.last().max_diff(&exact)
        })
        .collect();
    let order = slope(&dts, &errs);

    let spatial: Vec<f64> = [64, 128]
        .iter()
        .map(|&n| {
            let g = f.matched_grid(4, n).unwrap();
            let s = Solver::new(g, f.equation());
            let sol = s
                .solve(
                    &f.sample(&g, 0.0).unwrap(),
                    &SolverConfig::new(0.00125, 0.5),
                )
                .unwrap();
            sol.last().max_diff(&f.sample(&g, 0.5).unwrap())
        })
        .collect();
    let drop = spatial[0] / spatial[1];

    let mut drift: f64 = 0.0;
    let cn4_run = solver.solve(&u0, &SolverConfig::new(0.005, 1.0)).unwrap();
    let (m, q) = cn4_run.invariant_drift();
    drift = drift.max(m).max(q);
    let eq1 = EquationSpec::parse("0", "-1", (0.0, 2.0)).unwrap();
    let g = Grid1D::new(2.0 * PI, 64).unwrap();
    let u0 = Field::from_fn(&g, 0.0, |x| 0.3 + 0.1 * x.sin() + 0.05 * (2.0 * x).cos()).unwrap();
    let run = Solver::new(g, &eq1)
        .solve(&u0, &SolverConfig::new(1e-3, 2.0))
        .unwrap();
    let (m, q) = run.invariant_drift();
    drift = drift.max(m).max(q);

    verdict(
        7,
        "solver convergence and conservation",
        (order - 4.0).abs() <= 0.3 && drop >= 100.0 && drift < 1e-8,
        format!(
            "temporal order {order:.2} (errors {}), N 64->128 drop {drop:.1e}, invariant drift {drift:.1e}",
            errs.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>().join(" ")
        ),
    );
}

/// Run of a small smooth field, turned into a field defined for all `t`.
fn spectral_run(eq: &EquationSpec, t_end: f64) -> SpectralField {
    let g = Grid1D::new(2.0 * PI, 64).unwrap();
    let u0 = Field::from_fn(&g, 0.0, |x| 0.1 * x.sin() + 0.05 * (2.0 * x).cos()).unwrap();
    let sol = Solver::new(g, eq)
        .solve(&u0, &SolverConfig::new(2.5e-4, t_end))
        .unwrap();
    SpectralField::new(g, eq, &sol.series, 7).unwrap()
}

#[test]
fn a08_symmetry_flow() {
    let times = [0.6, 0.75, 0.9];
    let xs: Vec<f64> = (0..24).map(|i| 2.0 * PI * i as f64 / 24.0).collect();
    let eps_list = [0.01, 0.02, 0.04, 0.08];
    let mut ok = true;
    let mut notes = Vec::new();
    let cases = [
        (
            "case 2",
            "exp(t)",
            vec![Generator::new([5.0, 0.0, 0.0, 1.0, 0.0, 0.0])],
        ),
        (
            "case 4",
            "1",
            vec![
                Generator::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
                Generator::new([0.0, 5.0, 0.0, 1.0, 0.0, 0.0]),
            ],
        ),
    ];
    for (name, b, gens) in cases {
        let eq = EquationSpec::parse("0", b, (0.0, 1.2)).unwrap();
        let u = spectral_run(&eq, 1.2);
        for q in gens {
            let field = q.to_field();
            let exact = verify_invariance_by_flow(
                &field,
                &eq,
                &u,
                0.01,
                FlowScheme::Rk4 { steps: 8 },
                &times,
                &xs,
            );
            let euler: Vec<_> = eps_list
                .iter()
                .map(|&e| {
                    verify_invariance_by_flow(&field, &eq, &u, e, FlowScheme::Euler, &times, &xs)
                })
                .collect();
            let excess: Vec<f64> = euler.iter().map(|r| r.excess).collect();
            let s = slope(&eps_list, &excess);
            // A one-step push along a field with constant coefficients (∂t)
            // is already exact, so its excess sits at the noise floor.
            // A one-step push that already meets the bound has no ε² term to fit.
            let exact_push = euler.iter().all(|r| r.post <= 10.0 * exact.pre);
            ok &= exact.post <= 10.0 * exact.pre && ((s - 2.0).abs() <= 0.3 || exact_push);
            let scaling = if exact_push {
                format!(
                    "euler push already within bound, excess <= {:.1e}",
                    excess.iter().cloned().fold(0.0, f64::max)
                )
            } else {
                format!("euler excess slope {s:.2}")
            };
            notes.push(format!(
                "{name} {q}: pre {:.1e} post {:.1e}, {scaling}",
                exact.pre, exact.post
            ));
        }
    }
    verdict(
        8,
        "pushing solutions along extension generators",
        ok,
        notes.join("; "),
    );
}

#[test]
fn a09_equivalence_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let iv = (0.0, 1.0);
    let random_element = |rng: &mut ChaCha8Rng| loop {
        let (a, b, c, d) = (
            rng.gen_range(0.5..2.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-0.3..0.3),
            rng.gen_range(0.5..2.0),
        );
        let g = GZeroElement::new(
            a,
            b,
            c,
            d,
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.5..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
        );
        if let Ok(g) = g {
            if (a * d - b * c).abs() > 0.2 {
                return g;
            }
        }
    };
    let base = EquationSpec::parse("0", "t^2 + 1", iv).unwrap();
    let mut worst: f64 = 0.0;
    let mut passed = 0;
    for _ in 0..100 {
        let g1 = random_element(&mut rng);
        let g2 = random_element(&mut rng);
        let Ok(mid) = g1.apply_to_equation(&base) else {
            continue;
        };
        let (Ok(two_step), Ok(g21)) = (g2.apply_to_equation(&mid), g2.compose(&g1)) else {
            continue;
        };
        let one_step = g21.apply_to_equation(&base).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..16 {
            let t = (i as f64 + 0.5) / 16.0;
            let tt = g21.map_time(t);
            let (a, b) = (one_step.beta().value(tt), two_step.beta().value(tt));
            err = err.max((a - b).abs() / a.abs().max(1.0));
            let (t1, x1, u1) = g1.map_point(t, 0.3, -0.7);
            let p = g2.map_point(t1, x1, u1);
            let q = g21.map_point(t, 0.3, -0.7);
            err = err
                .max((p.0 - q.0).abs())
                .max((p.1 - q.1).abs())
                .max((p.2 - q.2).abs());
        }
        worst = worst.max(err);
        if err < 1e-8 {
            passed += 1;
        }
    }

    let mut flips = 0;
    let mut total = 0;
    for (b, iv) in [
        ("(t+1)^3", (0.0, 1.0)),
        ("(2*t+3)^3", (0.0, 1.0)),
        ("exp(t)", (0.0, 1.0)),
        ("t^1.5", (0.5, 2.0)),
    ] {
        let eq = EquationSpec::parse("0", b, iv).unwrap();
        let before = is_reducible_to_constant(&eq, 1e-6).unwrap().reducible;
        let mut n = 0;
        while n < 20 {
            let g = random_element(&mut rng);
            let Ok(image) = g.apply_to_equation(&eq) else {
                continue;
            };
            n += 1;
            total += 1;
            if is_reducible_to_constant(&image, 1e-6).unwrap().reducible != before {
                flips += 1;
            }
        }
    }
    verdict(
        9,
        "equivalence group closure and covariance",
        passed == 100 && flips == 0,
        format!(
            "{passed}/100 compositions (worst {worst:.1e}), {flips}/{total} reducibility flips"
        ),
    );
}

#[test]
fn a10_elliptic_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let u = rng.gen_range(-30.0..30.0);
        let k = rng.gen_range(0.0..0.999);
        let (sn, cn, _) = sn_cn_dn(u, k).unwrap();
        worst = worst.max((sn * sn + cn * cn - 1.0).abs());
    }
    // Periodic trapezoid rule on the full circle converges geometrically.
    let k = std::f64::consts::FRAC_1_SQRT_2;
    let n = 4096;
    let oracle = (0..n)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / n as f64;
            1.0 / (1.0 - k * k * th.sin().powi(2)).sqrt()
        })
        .sum::<f64>()
        * (2.0 * PI / n as f64)
        / 4.0;
    let kk = elliptic_k(k).unwrap();
    verdict(
        10,
        "elliptic kernel",
        worst < 1e-10 && (kk - oracle).abs() < 1e-10,
        format!(
            "identity err {worst:.1e}, K err {:.1e}",
            (kk - oracle).abs()
        ),
    );
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fkdv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fkdv"))
        .args(args)
        .env_remove("FKDV_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn ok(args: &[&str]) -> Value {
    let out = fkdv(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    json(&out)
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn classify_power_case() {
    let m = ok(&["classify", "--alpha", "0", "--beta", "t^1.5"]);
    assert_eq!(m["schema"], 1);
    let r = &m["results"];
    assert_eq!(r["case"], "power");
    assert_eq!(r["extension_dim"], 1);
    assert!((num(&r["parameters"]["rho"]) - 1.5).abs() < 1e-6);
    assert_eq!(r["basis"].as_array().unwrap().len(), 3);
    assert!(num(&r["nullspace_residual"]) < 1e-9);
}

#[test]
fn classify_constant_and_generic() {
    let r = &ok(&["classify", "--alpha", "0", "--beta", "1"])["results"];
    assert_eq!(r["case"], "constant");
    assert_eq!(r["extension_dim"], 2);
    let r = &ok(&["classify", "--alpha", "0", "--beta", "exp(t)+t"])["results"];
    assert_eq!(r["case"], "generic");
    assert_eq!(r["extension_dim"], 0);
}

#[test]
fn classify_with_damping_reports_original_basis() {
    let r = &ok(&["classify", "--alpha", "1", "--beta", "exp(-t)"])["results"];
    assert!(r["damped_basis"].is_array());
    for v in r["determining_residuals"].as_array().unwrap() {
        assert!(num(v) < 1e-8, "{v}");
    }
}

#[test]
fn floats_carry_seventeen_digits() {
    let out = fkdv(&["classify", "--beta", "t^1.5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"rho\"")).unwrap();
    let mantissa = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let digits = mantissa.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(digits.len(), 17, "{mantissa}");
}

#[test]
fn inconclusive_rank_exits_2() {
    let out = fkdv(&["classify", "--beta", "t^1.5", "--svd-tol", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["exit_code"], 2);
}

#[test]
fn parse_errors_exit_1() {
    let out = fkdv(&["classify", "--beta", "t^"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fkdv(&["classify"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fkdv(&["classify", "--beta", "1", "--t-range", "2:1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reduce_accelerated_starts_like_taylor() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&[
        "reduce",
        "--case",
        "4",
        "--subalgebra",
        "g4.2",
        "--sigma",
        "1",
        "--ic",
        "0,0,0,0,0",
        "--span",
        "0:2",
        "--out",
        d,
    ]);
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("omega,phi,dphi,d2phi,d3phi,d4phi"));
    let mut checked = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let w = v[0];
        if w == 0.0 || w > 0.2 {
            continue;
        }
        // φ = ω⁵/120 + O(ω¹¹) from φ⁽⁵⁾ = −φφ′ + 1 with zero data.
        let want = w.powi(5) / 120.0;
        assert!(
            (v[1] - want).abs() <= 1e-6 * want,
            "{w}: {} vs {want}",
            v[1]
        );
        checked += 1;
    }
    assert!(checked > 0);
    let m: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m["results"]["reconstruction"]["status"], "ok");
    assert!(num(&m["results"]["reconstruction"]["residual"]) < 1e-6);
}

#[test]
fn reduce_first_order_branch() {
    let r = &ok(&["reduce", "--case", "0", "--a", "1", "--phi0", "2"])["results"];
    assert_eq!(r["order"], 1);
    // φ = C/(ω+1) with C = 2 from φ(0) = 2.
    assert!((num(&r["final"]["state"][0]) - 2.0 / 3.0).abs() < 1e-12);
    assert!(num(&r["reconstruction"]["residual"]) < 1e-10);
}

#[test]
fn reduce_rejects_foreign_label() {
    let out = fkdv(&["reduce", "--case", "2", "--subalgebra", "g4.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));
}

#[test]
fn reduce_blow_up_exits_3_with_location() {
    let out = fkdv(&[
        "reduce",
        "--case",
        "4",
        "--subalgebra",
        "g4.1",
        "--ic",
        "1,1,1,1,1",
        "--span",
        "0:30",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let at = num(&json(&out)["error"]["at"]);
    assert!(at > 0.0 && at < 30.0);
}

#[test]
fn exact_cn4_check() {
    let r = &ok(&[
        "exact", "cn4", "--alpha", "0", "--c1", "0", "--c2", "1", "--a", "1", "--check",
    ])["results"];
    assert!(num(&r["residual"]) < 1e-6);
    assert!(num(&r["spatial_period"]) > 0.0);
}

#[test]
fn exact_degenerate_check() {
    for alpha in ["0", "1", "1/t"] {
        let r = &ok(&["exact", "degenerate", "--alpha", alpha, "--check"])["results"];
        assert!(num(&r["residual"]) < 1e-8, "{alpha}");
    }
}

#[test]
fn transform_reduce_to_constant() {
    let r = &ok(&[
        "transform",
        "reduce-to-constant",
        "--alpha",
        "0",
        "--beta",
        "(t+1)^3",
    ])["results"];
    assert_eq!(r["reducible"], true);
    assert!(num(&r["mu"]).is_finite());
    assert!(num(&r["chain"]["beta_residual"]) < 1e-8);
    assert!(r["chain"]["moebius"].is_object());
    let r = &ok(&["transform", "reduce-to-constant", "--beta", "exp(t)"])["results"];
    assert_eq!(r["reducible"], false);
}

#[test]
fn transform_gauge_and_apply() {
    let r = &ok(&["transform", "gauge", "--alpha", "0.5", "--beta", "t"])["results"];
    assert!(num(&r["alpha_residual"]) < 1e-10);
    let r = &ok(&[
        "transform",
        "apply",
        "--beta",
        "1",
        "--element",
        "1,0,0,1,0,0,2",
    ])["results"];
    // x̃ = 2x stretches β by 2⁵.
    assert!((num(&r["image"]["samples"][0]["beta"]) - 32.0).abs() < 1e-9);
}

fn solve_into(dir: &Path) {
    ok(&[
        "solve",
        "--beta",
        "t^2",
        "--t-range",
        "1:1.3",
        "--u0",
        "0.1*sin(x)+0.05*cos(2*x)",
        "--dt",
        "5e-4",
        "--stride",
        "1",
        "--out",
        dir.to_str().unwrap(),
    ]);
}

#[test]
fn verify_translation_keeps_residual() {
    let dir = tempfile::tempdir().unwrap();
    solve_into(dir.path());
    let field = dir.path().join("field.csv");
    let r = &ok(&[
        "verify",
        "--generator",
        "0,0,0,0,0,1",
        "--beta",
        "t^2",
        "--t-range",
        "1:1.3",
        "--solution",
        field.to_str().unwrap(),
    ])["results"];
    assert!(num(&r["determining_residuals"]["max"]) < 1e-12);
    let ratio = num(&r["flow"]["ratio"]);
    assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
}

#[test]
fn verify_rejects_non_symmetry() {
    let r = &ok(&["verify", "--generator", "1,0,0,0,0,0", "--beta", "t^2"])["results"];
    assert!(num(&r["determining_residuals"]["classifying"]) > 1e-3);
}

#[test]
fn manifest_rerun_is_bit_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    solve_into(a.path());
    let manifest = a.path().join("manifest.json");
    ok(&[
        "solve",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        b.path().to_str().unwrap(),
    ]);
    for f in ["field.csv", "monitors.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
    let load = |d: &Path| -> Value {
        serde_json::from_str(&std::fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap()
    };
    assert_eq!(load(a.path())["results"], load(b.path())["results"]);
}

#[test]
fn toml_config_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "alpha = \"0\"\n[classify]\nbeta = \"exp(t)+t\"\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(
        ok(&["classify", "--config", p])["results"]["case"],
        "generic"
    );
    assert_eq!(
        ok(&["classify", "--config", p, "--beta", "1"])["results"]["case"],
        "constant"
    );
}

#[test]
fn csv_format_prints_table() {
    let out = fkdv(&["classify", "--beta", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("c0,c1,c2,c3,c4,c5\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn thread_cap_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_fkdv"))
        .args(["classify", "--beta", "1"])
        .env("FKDV_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_fkdv"))
        .args(["classify", "--beta", "1"])
        .env("FKDV_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn help_lists_flags_with_defaults() {
    for cmd in [
        "classify",
        "reduce",
        "solve",
        "exact",
        "verify",
        "transform",
    ] {
        let out = fkdv(&[cmd, "--help"]);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("--config"), "{cmd}");
        assert!(text.contains("[default: "), "{cmd}");
    }
}

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("darboux-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str], out: &Path) -> (i32, Value) {
    let o = Command::new(env!("CARGO_BIN_EXE_darboux")).args(args).arg("--out").arg(out).output().unwrap();
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), report, "stdout mirrors report.json");
    (o.status.code().unwrap(), serde_json::from_str(&report).unwrap())
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn saddle_identities_pass_below_1e8() {
    let out = scratch("identities");
    let (code, r) = run(&["verify", "identities", "--fixture", "saddle"], &out);
    assert_eq!(code, 0);
    for c in r["checks"].as_array().unwrap() {
        assert!(c["value"].as_f64().unwrap() < 1e-8, "{c}");
    }
    assert_eq!(r["config"]["seed"], darboux_cli::commands::DEFAULT_SEED);
}

#[test]
fn constant_curvature_one_gives_cosine_warp() {
    let out = scratch("metric");
    let (code, r) = run(&["metric", "from-k", "--constant", "1", "--domain", "-0.4:0.4"], &out);
    assert_eq!(code, 0);
    assert!(check(&r, "curvature_round_trip")["value"].as_f64().unwrap() < 1e-6);
    assert!(check(&r, "warp_closed_form")["value"].as_f64().unwrap() < 1e-8);
    let dump = std::fs::read_to_string(out.join("warp.csv")).unwrap();
    assert!(dump.starts_with("x,y,value\n"));
}

#[test]
fn saddle2_reduction_normalizes_fbar() {
    let out = scratch("reduce");
    let (code, r) = run(&["reduce", "--fixture", "saddle2", "--point", "0,0"], &out);
    assert_eq!(code, 0);
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.join("reduce.json")).unwrap()).unwrap();
    assert!((summary["fbar_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!(summary["convergence_order"].as_f64().unwrap() >= 2.0);
    for f in ["s.csv", "u.csv", "f.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(check(&r, "reduced_residual_halving_ratio")["pass"].as_bool().unwrap());
}

#[test]
fn curvature_build_with_explicit_schedule() {
    let out = scratch("build");
    std::fs::create_dir_all(&out).unwrap();
    let spec = out.join("spec.json");
    // γ ≡ 1 violates the certificate from some n on.
    std::fs::write(&spec, r#"{"n_max": 2, "gamma_rule": [1.0, 1.0], "phi": "default_bump"}"#).unwrap();
    let (code, r) = run(&["curvature", "build", "--spec", spec.to_str().unwrap(), "--h", "0.01"], &out);
    assert_eq!(code, 1);
    assert!(!check(&r, "gamma_schedule_violations")["pass"].as_bool().unwrap());
    let (code, _) = run(&["curvature", "build", "--nmax", "3", "--h", "0.01"], &out);
    assert_eq!(code, 0);
    assert!(out.join("k.csv").exists());
}

#[test]
fn usage_errors_exit_2() {
    let bin = env!("CARGO_BIN_EXE_darboux");
    for args in [
        &["reduce", "--fixture", "cube"][..],
        &["reduce", "--fixture", "sphere", "--point", "0;0"],
        &["reduce", "--fixture", "sphere", "--h", "-1"],
        &["metric", "from-k", "--domain", "1:0"],
        &["frobnicate"],
    ] {
        let code = Command::new(bin).args(args).output().unwrap().status.code();
        assert_eq!(code, Some(2), "{args:?}");
    }
}

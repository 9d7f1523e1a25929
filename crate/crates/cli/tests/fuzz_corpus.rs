//! Replays the checked-in fuzz seeds through the fuzzed entry points.

use std::fs;
use std::path::PathBuf;

use darboux_cli::args::{parse_interval, parse_point, parse_positive};
use darboux_core::curvature::CurvatureSpec;
use darboux_core::fields::parse_field_csv;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn curvature_spec_seeds() {
    let parsed: Vec<_> = seeds("curvature_spec")
        .into_iter()
        .map(|(name, data)| (name, CurvatureSpec::from_json(std::str::from_utf8(&data).unwrap()).is_ok()))
        .collect();
    let ok = |n: &str| parsed.iter().find(|(m, _)| m == n).unwrap().1;
    assert!(ok("default.json") && ok("explicit.json"));
    assert!(!ok("zero.json") && !ok("bad.json"));
}

#[test]
fn field_csv_seeds() {
    for (name, data) in seeds("field_csv") {
        let res = parse_field_csv(data.as_slice());
        assert_eq!(res.is_ok(), name == "grid9.csv", "{name}");
    }
}

#[test]
fn cli_args_seeds() {
    for (name, data) in seeds("cli_args") {
        let s = std::str::from_utf8(&data).unwrap();
        let accepted = [parse_point(s).is_ok(), parse_interval(s).is_ok(), parse_positive(s).is_ok()];
        let want = match name.as_str() {
            "origin" => [true, false, false],
            "interval" => [false, true, false],
            "step" => [false, false, true],
            _ => [false, false, false],
        };
        assert_eq!(accepted, want, "{name}");
    }
}

use std::path::Path;
use std::process::Command;

use kmsurf_cli::report::{emit, Report};
use kmsurf_cli::repro::{BUNDLED_EXPECTED, BUNDLED_SCENARIO};
use kmsurf_cli::scenario::{Check, Scenario};
use kmsurf_cli::{
    bundled_scenario, explore_frobenius, load_scenario, run_repro, run_scenario, CliError,
};
use proptest::prelude::*;
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kmsurf"))
}

fn write(dir: &Path, name: &str, s: &Scenario) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, s.to_json()).unwrap();
    p
}

#[test]
fn bundled_scenario_shape() {
    let s = bundled_scenario();
    assert_eq!(s.blowups.len(), 9);
    assert_eq!(s.contraction.len(), 10);
    let built = s.build().unwrap();
    assert_eq!(built.model.rank(), 11);
}

#[test]
fn repro_passes_and_matches_golden() {
    let r = run_repro();
    assert!(r.passed(), "{}", r.to_text());
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.to_json(), BUNDLED_EXPECTED);
    // Determinism across runs.
    assert_eq!(run_repro().to_json(), r.to_json());
}

#[test]
fn repro_report_contents() {
    let r = run_repro();
    let kvv = r.check("kvv_failure").unwrap();
    assert_eq!(kvv.get("euler_char"), Some(&json!("-1/1")));
    let cone = r.check("cone").unwrap();
    assert_eq!(cone.get("r"), Some(&json!("-1/1")));
    let sing = r.check("singularities").unwrap();
    assert_eq!(sing.get("count"), Some(&json!(7)));
    let disc = r
        .check("canonical_pullback")
        .unwrap()
        .get("discrepancies")
        .unwrap();
    let values: Vec<&str> = disc
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(values.iter().filter(|v| **v == "-1/3").count(), 4);
    assert_eq!(values.iter().filter(|v| **v == "0/1").count(), 6);
}

#[test]
fn scenario_round_trip() {
    let s = bundled_scenario();
    let again = Scenario::from_json(&s.to_json()).unwrap();
    assert_eq!(again, s);
    // The bundled file is already in canonical form.
    assert_eq!(s.to_json(), BUNDLED_SCENARIO);
}

#[test]
fn undeclared_curve_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = bundled_scenario();
    s.blowups[0].incident[0].curve = "Z".into();
    let p = write(dir.path(), "bad.json", &s);
    let err = load_scenario(&p).unwrap_err();
    assert!(matches!(err, CliError::Invalid { .. }));
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("blowups[0]"));
}

#[test]
fn undeclared_divisor_in_check_is_rejected() {
    let mut s = bundled_scenario();
    s.checks.push(Check::Degree {
        divisor: "B".into(),
        expected: None,
    });
    assert!(s.build().is_err());
}

#[test]
fn incidence_budget_is_rejected() {
    let mut s = bundled_scenario();
    // G1 and F2 do not meet.
    s.blowups[1].incident[1].curve = "F2".into();
    let err = s.build().unwrap_err();
    assert!(err.to_string().contains("blowups[1]"), "{err}");
}

#[test]
fn parse_error_has_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{\n  \"schema_version\": 1,\n  \"name\": }\n").unwrap();
    match load_scenario(&p).unwrap_err() {
        CliError::Parse { line, .. } => assert_eq!(line, 3),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn empty_blowups_is_valid() {
    let s: Scenario = serde_json::from_value(json!({
        "schema_version": 1,
        "name": "bare",
        "base": "quadric",
        "curves": [{"name": "L", "class": [1, 1]}],
        "blowups": [],
    }))
    .unwrap();
    let built = s.build().unwrap();
    assert_eq!(built.model.rank(), 2);
    let r = run_scenario(&s).unwrap();
    assert!(r.passed());
    assert!(r.checks.is_empty());
    let doc: Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(doc["checks"], json!([]));
}

#[test]
fn zero_polarization_fails_kvv_expectation() {
    let mut s = bundled_scenario();
    s.divisors[0].expr = "0".into();
    let r = run_scenario(&s).unwrap();
    assert!(!r.passed());
    assert_eq!(r.exit_code, 1);
    let kvv = r.check("kvv_failure").unwrap();
    assert!(!kvv.passed());
    assert_eq!(kvv.get("euler_char"), Some(&json!("1/1")));
    assert_eq!(kvv.get("h1_nonzero"), Some(&json!(false)));
}

#[test]
fn missing_c_fails_rank_check() {
    let mut s = bundled_scenario();
    s.contraction.retain(|n| n != "C");
    let r = run_scenario(&s).unwrap();
    assert!(!r.passed());
    let rank = r.check("rank").unwrap();
    assert!(!rank.passed());
    assert_eq!(rank.get("target_rank"), Some(&json!(2)));
    assert_eq!(rank.mismatches[0].expected, json!(1));
}

#[test]
fn unwritable_output() {
    let err = emit("x", Some(Path::new("/nonexistent-dir/report.json"))).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn explorer_agrees_with_bundled_geometry() {
    let e = explore_frobenius(3, 3).unwrap();
    let b = bundled_scenario();
    assert_eq!(e.scenario.curves, b.curves);
    assert_eq!(e.scenario.blowups, b.blowups);
    assert_eq!(e.scenario.contraction, b.contraction);
    let r = run_repro();
    assert_eq!(
        json!(e.census),
        r.check("singularities")
            .unwrap()
            .get("types")
            .cloned()
            .unwrap()
    );
}

#[test]
fn binary_exit_codes() {
    let out = bin().args(["repro", "--format", "json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), BUNDLED_EXPECTED);

    let dir = tempfile::tempdir().unwrap();
    let mut s = bundled_scenario();
    s.contraction.retain(|n| n != "C");
    let p = write(dir.path(), "noc.json", &s);
    let out = bin().arg("run").arg("--scenario").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("expected"));

    let out = bin()
        .args(["run", "--scenario", "/nonexistent/scenario.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["explore", "--p", "3", "--points", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("C not contractible"));
}

#[test]
fn binary_writes_out_file_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let st = bin()
            .args(["repro", "--format", "json", "--out"])
            .arg(p)
            .status()
            .unwrap();
        assert!(st.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let s = write(dir.path(), "s.json", &bundled_scenario());
    let out = bin()
        .arg("run")
        .arg("--scenario")
        .arg(&s)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.stdout, std::fs::read(&a).unwrap());
}

#[test]
fn explore_json_output() {
    let out = bin()
        .args(["explore", "--p", "5", "--points", "3", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["degree_anticanonical"], json!("-1/1"));
    assert_eq!(v["verdict"], json!("canonically_ample"));
    assert_eq!(v["provenance"], json!("extrapolated construction"));
}

#[test]
fn report_text_lists_intersections() {
    let text = run_repro().to_text();
    assert!(text.contains("C^2 = -3"));
    assert!(text.contains("E1.F1 = 1"));
    assert!(text.contains("status: PASS (13/13 checks)"));
    let r: Report = run_repro();
    assert!(r.first_failure().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn explorer_scenarios_round_trip(p in 2u64..6, n in 3u64..6) {
        let s = explore_frobenius(p, n).unwrap().scenario;
        let text = s.to_json();
        let back = Scenario::from_json(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_json(), text);
    }
}

use std::process::Command;

use macroq_cli::presets::{preset_rows, preset_source};
use macroq_cli::report::{read_csv, read_json, write_csv, write_json};
use macroq_cli::{run, CliError, ReportRow, RunManifest, RunOptions};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

const SCS_SWEEP: &str = r#"
seed = 11

[[states]]
id = "cat"
kind = "scs"
alpha = 1.0

[sweep]
param = "alpha"
values = [0.5, 1, 2, 3]

[[measures]]
kind = "measure_i"
"#;

const MIXED: &str = r#"
seed = 5

[[states]]
id = "ghz"
kind = "ghz"
n = 4

[[states]]
id = "cooper"
kind = "cooper"
n = 2

[[states]]
id = "cat"
kind = "scs"
alpha = 1.5

[[measures]]
kind = "fisher_neff"
states = ["ghz", "cooper"]

[[measures]]
kind = "purity"

[[measures]]
kind = "marquardt"
"#;

fn scs_closed_form(alpha: f64) -> f64 {
    let e = (-2.0 * alpha * alpha).exp();
    alpha * alpha * (1.0 - e) / (1.0 + e)
}

fn manifest(text: &str) -> RunManifest {
    RunManifest::from_toml_str(text).unwrap()
}

#[test]
fn cat_sweep_matches_closed_form() {
    let rows = run(&manifest(SCS_SWEEP), &RunOptions::default()).unwrap();
    assert_eq!(rows.len(), 4);
    for (row, alpha) in rows.iter().zip([0.5, 1.0, 2.0, 3.0]) {
        assert_eq!(row.param_name, "alpha");
        assert_eq!(row.param_value, Some(alpha));
        let v = row.value.unwrap();
        assert!((v - scs_closed_form(alpha)).abs() < 1e-5, "{alpha}: {v}");
    }
}

#[test]
fn empty_measure_list_gives_no_rows() {
    let m = manifest("[[states]]\nid = \"v\"\nkind = \"vacuum\"\n");
    assert!(run(&m, &RunOptions::default()).unwrap().is_empty());
}

#[test]
fn unknown_measure_tag_is_named() {
    let text = "[[states]]\nid = \"v\"\nkind = \"vacuum\"\n\n[[measures]]\nkind = \"entanglement_of_formation\"\n";
    let err = RunManifest::from_toml_str(text).unwrap_err();
    assert!(matches!(err, CliError::Manifest(_)));
    let msg = err.to_string();
    assert!(msg.contains("entanglement_of_formation"), "{msg}");
    assert!(msg.contains("line"), "no position in {msg}");
}

#[test]
fn unknown_preset() {
    assert!(matches!(preset_source("nonexistent"), Err(CliError::UnknownPreset { .. })));
    assert!(preset_rows("nonexistent", &RunOptions::default()).is_err());
}

#[test]
fn failures_become_error_rows_in_order() {
    let rows = run(&manifest(MIXED), &RunOptions { jobs: Some(3), seed: None }).unwrap();
    let keys: Vec<(&str, &str)> = rows.iter().map(|r| (r.state_id.as_str(), r.measure.as_str())).collect();
    assert_eq!(
        keys,
        vec![
            ("ghz", "fisher_neff"),
            ("ghz", "purity"),
            ("ghz", "marquardt"),
            ("cooper", "fisher_neff"),
            ("cooper", "purity"),
            ("cooper", "marquardt"),
            ("cat", "purity"),
            ("cat", "marquardt"),
        ]
    );
    let errors: Vec<&ReportRow> = rows.iter().filter(|r| r.is_error()).collect();
    assert_eq!(errors.len(), 3);
    assert!(errors.iter().all(|r| r.measure == "marquardt" && r.value.is_none()));
}

fn values(rows: &[ReportRow]) -> Vec<(String, Option<u64>, Option<u64>, String)> {
    rows.iter()
        .map(|r| {
            (
                format!("{}/{}", r.state_id, r.measure),
                r.value.map(f64::to_bits),
                r.error_estimate.map(f64::to_bits),
                r.method.clone(),
            )
        })
        .collect()
}

#[test]
fn reruns_are_identical() {
    let m = manifest(MIXED);
    let a = run(&m, &RunOptions { jobs: Some(1), seed: None }).unwrap();
    let b = run(&m, &RunOptions { jobs: Some(4), seed: None }).unwrap();
    assert_eq!(values(&a), values(&b));
    let c = run(&m, &RunOptions { jobs: Some(2), seed: Some(5) }).unwrap();
    assert_eq!(values(&a), values(&c));
}

#[test]
fn json_round_trip_is_exact() {
    let rows = run(&manifest(SCS_SWEEP), &RunOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_json(&rows, &mut buf).unwrap();
    assert_eq!(read_json(buf.as_slice()).unwrap(), rows);
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x == y || (x - y).abs() <= 5e-9 * x.abs().max(y.abs()),
        _ => false,
    }
}

#[test]
fn csv_round_trip_keeps_printed_precision() {
    let rows = run(&manifest(MIXED), &RunOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("state_id,param_name,param_value,measure,value,error_estimate,method,seconds\n"));
    let back = read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!((&a.state_id, &a.measure, &a.error), (&b.state_id, &b.measure, &b.error));
        assert!(close(a.value, b.value) && close(a.error_estimate, b.error_estimate));
        if !a.is_error() {
            assert_eq!(a.method, b.method);
        }
    }
}

fn arb_row() -> impl Strategy<Value = ReportRow> {
    let num = prop_oneof![Just(None), any::<f64>().prop_filter("finite", |x| x.is_finite()).prop_map(Some)];
    (num.clone(), num.clone(), num, "[a-z_]{1,8}", proptest::option::of("[ -~]{0,20}")).prop_map(
        |(pv, v, e, name, err)| ReportRow {
            state_id: name.clone(),
            param_name: if pv.is_some() { "alpha".into() } else { String::new() },
            param_value: pv,
            measure: name,
            value: if err.is_some() { None } else { v },
            error_estimate: if err.is_some() { None } else { e },
            method: if err.is_some() { String::new() } else { "m".into() },
            seconds: 0.5,
            error: err,
            metadata: Default::default(),
        },
    )
}

proptest! {
    #![proptest_config(Config { cases: 64, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() })]

    #[test]
    fn any_rows_survive_json(rows in proptest::collection::vec(arb_row(), 0..6)) {
        let mut buf = Vec::new();
        write_json(&rows, &mut buf).unwrap();
        prop_assert_eq!(read_json(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn any_rows_survive_csv(rows in proptest::collection::vec(arb_row(), 0..6)) {
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            prop_assert!(close(a.param_value, b.param_value));
            prop_assert!(close(a.value, b.value));
            prop_assert!(close(a.error_estimate, b.error_estimate));
            prop_assert_eq!(&a.error, &b.error);
        }
    }
}

fn macroq() -> Command {
    Command::new(env!("CARGO_BIN_EXE_macroq"))
}

fn write_temp(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("macroq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn binary_exit_codes() {
    let ok = write_temp("ok.toml", SCS_SWEEP);
    let out = macroq().args(["run", ok.to_str().unwrap(), "--format", "json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows = read_json(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 4);

    let partial = write_temp("partial.toml", MIXED);
    let out = macroq().args(["run", partial.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let bad = write_temp("bad.toml", "[[measures]]\nkind = \"nope\"\n");
    let out = macroq().args(["run", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));

    let out = macroq().args(["preset", "nonexistent"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn binary_writes_report_file() {
    let m = write_temp("file.toml", SCS_SWEEP);
    let report = m.with_file_name("report.csv");
    let out = macroq().args(["run", m.to_str().unwrap(), "--out", report.to_str().unwrap(), "--jobs", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv(std::fs::File::open(&report).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
}

#[test]
fn binary_inspects_a_state() {
    let csv_path = write_temp("w.csv", "");
    let out = macroq()
        .args(["state", "inspect", "kind = \"scs\"\nalpha = 2.0\nphi = 3.141592653589793"])
        .args(["--wigner-csv", csv_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("mean photon number") && text.contains("W min"), "{text}");
    let grid = std::fs::read_to_string(&csv_path).unwrap();
    assert!(grid.starts_with("x,p,value\n"));
    assert_eq!(grid.lines().count(), 1 + macroq_cli::inspect::WIGNER_POINTS.pow(2));
}

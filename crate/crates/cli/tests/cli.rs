use std::process::{Command, Output};

use lzbounded::observables::path_c_closed_infidelity;
use lzbounded::{evolve_series, PathSpec, SolverKind, Variant};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lzbounded")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn evolve_path_c_matches_closed_form() {
    let o = run(&["evolve", "--path", "C", "--x0", "0.2", "--z0", "0.5", "--T", "5", "--samples", "101"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(
        header,
        ["path", "x0", "z0", "T", "t", "a0_re", "a0_im", "a1_re", "a1_im", "infidelity", "solver"]
    );
    assert_eq!(rows.len(), 101);
    let s = PathSpec::new(Variant::C, 0.2, 0.5, 5.0).unwrap();
    for row in &rows {
        let closed = path_c_closed_infidelity(&s, num(&row[4])).unwrap();
        assert!((num(&row[9]) - closed).abs() < 1e-12);
    }
}

#[test]
fn oracle_run_starts_in_ground_state() {
    let o = run(&["evolve", "--path", "A", "--x0", "0.05", "--z0", "0.1", "--T", "5", "--solver", "oracle"]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows[0][10], "oracle");
    assert!(num(&rows[0][9]).abs() < 1e-12);
}

#[test]
fn final_reports_the_diabatic_limit() {
    let o = run(&["final", "--path", "A,B,C", "--x0", "0.2", "--z0", "0.5", "--T", "1e-6"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(
        header,
        ["path", "x0", "z0", "T", "I_exact", "I_LZ", "I_APT", "APT_envelope", "T_minus", "T_plus", "T_c"]
    );
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert!((num(&row[4]) - 0.25 / 0.29).abs() < 1e-6);
    }
    assert!(!rows[0][5].is_empty());
    assert!(rows[1][5].is_empty() && rows[2][5].is_empty());
}

#[test]
fn zero_lists() {
    let o = run(&["zeros", "--path", "C", "--x0", "0.2", "--z0", "0.5", "--T", "12"]);
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["path", "x0", "z0", "T", "k", "t_k", "I"]);
    assert_eq!(rows.len(), 3);
    let o = run(&["zeros", "--path", "C", "--x0", "0.2", "--z0", "0.5", "--T", "3"]);
    assert_eq!(csv_rows(&stdout(&o)).1.len(), 1);
    let o = run(&["zeros", "--path", "A", "--x0", "0.2", "--z0", "0.5", "--T", "95", "--zero-tol", "1e-4"]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&stdout(&o));
    assert!(rows.iter().any(|r| num(&r[5]) > 47.5 && num(&r[6]) < 1e-4));
}

#[test]
fn crossover_table() {
    let o = run(&["crossover", "--x0", "0.063", "--z0", "0.126,0.0315", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert!((rows[0]["T_c"].as_f64().unwrap() - 182.2).abs() < 0.05);
    assert!((rows[0]["T_minus"].as_f64().unwrap() - 7.967).abs() < 1e-3);
    assert!(rows[1]["T_c"].is_null() && rows[1]["T_plus"].is_null());
}

#[test]
fn validate_default_grid_passes() {
    let o = run(&["validate"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["pass"], Value::Bool(true));
    for p in report["paths"].as_array().unwrap() {
        assert!(p["max_deviation"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn validate_path_c_only() {
    let o = run(&["validate", "--path", "C"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let paths = report["paths"].as_array().unwrap();
    assert_eq!(paths.len(), 1);
    assert!(paths[0]["max_deviation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn loose_oracle_fails_validation_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    let o = run(&["validate", "--rtol", "1e-3", "--atol", "1e-3", "--out", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(report["pass"], Value::Bool(false));
}

#[test]
fn json_output_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("series.json");
    let o = run(&[
        "evolve", "--path", "B", "--x0", "0.2", "--z0", "0.5", "--T", "5", "--samples", "33", "--solver", "analytic",
        "--format", "json", "--out", file.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    let series = evolve_series(&PathSpec::new(Variant::B, 0.2, 0.5, 5.0).unwrap(), 33, SolverKind::Analytic).unwrap();
    assert_eq!(rows.len(), series.len());
    for (i, row) in rows.iter().enumerate() {
        let f = |k: &str| row[k].as_f64().unwrap();
        assert_eq!(f("t"), series.times[i]);
        assert_eq!(f("a0_re"), series.amplitudes[i].a0.re);
        assert_eq!(f("a0_im"), series.amplitudes[i].a0.im);
        assert_eq!(f("a1_re"), series.amplitudes[i].a1.re);
        assert_eq!(f("a1_im"), series.amplitudes[i].a1.im);
        assert_eq!(f("infidelity"), series.infidelity[i]);
    }
}

#[test]
fn sweeps_are_deterministic() {
    let args = ["evolve", "--path", "A,B,C", "--x0", "0.01:1:20", "--z0", "0.1,0.5,1.0", "--T", "5", "--samples", "21"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let (_, rows) = csv_rows(&stdout(&a));
    assert_eq!(rows.len(), 3 * 20 * 3 * 21);
    assert_eq!(rows[0][0], "A");
    assert_eq!(rows.last().unwrap()[0], "C");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["evolve", "--path", "D", "--x0", "1", "--z0", "1", "--T", "1"],
        vec!["evolve", "--path", "A", "--x0", "0:1:0", "--z0", "1", "--T", "1"],
        vec!["evolve", "--path", "A", "--x0=-1", "--z0", "1", "--T", "1"],
        vec!["evolve", "--path", "A", "--x0", "1", "--z0", "1", "--T", "1", "--samples", "1"],
        vec!["final", "--path", "A", "--x0", "1", "--z0", "1", "--T", "1", "--rtol", "0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn solver_failure_exits_with_three() {
    let o = run(&["final", "--path", "A", "--x0", "0.2", "--z0", "0.1", "--T", "2000", "--solver", "analytic"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("did not converge"));
    let o = run(&["final", "--path", "A", "--x0", "0.2", "--z0", "0.1", "--T", "2000"]);
    assert_eq!(o.status.code(), Some(0));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qudit_tomo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qudit-tomo"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = qudit_tomo(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("JSON output")
}

fn read_json(path: &Path) -> Value {
    json(&std::fs::read_to_string(path).unwrap())
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap())
        .collect()
}

fn column(text: &str, name: &str) -> Vec<String> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let idx = reader.headers().unwrap().iter().position(|h| h == name).expect("column");
    csv_rows(text).iter().map(|r| r[idx].to_string()).collect()
}

#[test]
fn malformed_basis_file_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"d": 2, "elements": [{"label": "H", "ket": [[1, 0], [0]]}]}"#,
    )
    .unwrap();
    ok(dir.path(), &["gen-state", "--name", "H", "--d", "2", "--out", "h.json"]);
    let out = qudit_tomo(
        dir.path(),
        &["simulate", "--state", "h.json", "--basis", "bad.json", "--shots", "100"],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = json(&String::from_utf8_lossy(&out.stderr));
    assert_eq!(err["error"]["field"], "elements[0].ket[1]");
    assert_eq!(err["error"]["kind"], "invalid");
}

#[test]
fn numerical_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qudit_tomo(
        dir.path(),
        &["pipeline", "--name", "H", "--d", "2", "--basis", "qubit-nonorth:0:0.3"],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = json(&String::from_utf8_lossy(&out.stderr));
    assert!(err["error"]["kind"].is_string());
    assert_eq!(qudit_tomo(dir.path(), &["budget"]).status.code(), Some(1));
}

#[test]
fn exact_linear_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["--seed", "3", "gen-state", "--random", "mixed", "--d", "3", "--out", "rho.json"]);
    ok(
        d,
        &["--exact", "simulate", "--state", "rho.json", "--basis", "qutrit-paper9", "--shots", "1000", "--out", "counts.json"],
    );
    ok(
        d,
        &["reconstruct", "--counts", "counts.json", "--basis", "qutrit-paper9", "--method", "linear", "--out", "rec.json"],
    );
    let f = json(&ok(d, &["fidelity", "--a", "rho.json", "--b", "rec.json"]));
    assert!((f["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let rec = read_json(&d.join("rec.json"));
    assert_eq!(rec["schema"], 1);
    assert!((rec["scale"].as_f64().unwrap() - 1000.0).abs() < 1e-9);
}

#[test]
fn generator_basis_and_budget_output() {
    let dir = tempfile::tempdir().unwrap();
    let basis = json(&ok(dir.path(), &["gen-basis", "--d", "3"]));
    assert_eq!(basis.as_array().unwrap().len(), 9);
    let two = json(&ok(dir.path(), &["gen-basis", "--d", "2", "--n", "2"]));
    assert_eq!(two.as_array().unwrap().len(), 16);
    let b = json(&ok(dir.path(), &["budget", "--d", "3", "--n", "2"]));
    assert_eq!(b["measurements"], 80);
    let b = json(&ok(dir.path(), &["budget", "--d", "2", "--n", "2", "--pure"]));
    assert_eq!(b["measurements"], 6);
    let csv = ok(dir.path(), &["--format", "csv", "budget", "--d", "3"]);
    assert_eq!(column(&csv, "optical_elements"), vec!["18"]);
}

#[test]
fn pipeline_reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        ok(
            dir.path(),
            &["--seed", "11", "--out", out, "pipeline", "--random", "pure", "--d", "3", "--basis", "qutrit-paper9", "--shots", "500", "--method", "mle"],
        );
    };
    run("a");
    run("b");
    for file in ["counts.json", "reconstruction.json"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
    let strip = |v: &mut Value| {
        v.as_object_mut().unwrap().remove("timings");
    };
    let mut a = read_json(&dir.path().join("a/report.json"));
    let mut b = read_json(&dir.path().join("b/report.json"));
    assert!(a["timings"]["total_ms"].as_f64().unwrap() >= 0.0);
    strip(&mut a);
    strip(&mut b);
    assert_eq!(a, b);
    assert_eq!(a["budget"]["mixed"], 8);
}

#[test]
fn csv_report_format() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["--format", "csv", "--out", "run", "pipeline", "--name", "D", "--d", "2", "--basis", "qubit-hvdl", "--shots", "100"],
    );
    let text = std::fs::read_to_string(dir.path().join("run/report.csv")).unwrap();
    assert_eq!(csv_rows(&text).len(), 1);
    assert_eq!(column(&text, "budget_mixed"), vec!["3"]);
}

#[test]
fn single_point_sweep_matches_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let state = ["--random", "mixed", "--d", "2", "--state-seed", "5", "--basis", "qubit-hvdl"];
    let mut pipeline = vec!["--seed", "7", "pipeline", "--shots", "1000"];
    pipeline.extend(state);
    let report = json(&ok(dir.path(), &pipeline));
    let mut sweep = vec!["--seed", "7", "sweep", "--axis", "shots", "--values", "1000", "--replicates", "1"];
    sweep.extend(state);
    let text = ok(dir.path(), &sweep);
    assert_eq!(csv_rows(&text).len(), 1);
    let fid: f64 = column(&text, "mean_fidelity")[0].parse().unwrap();
    assert_eq!(fid, report["fidelity"].as_f64().unwrap());
}

#[test]
fn dimension_sweep_budget_column() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        dir.path(),
        &["sweep", "--name", "mixed", "--d", "2", "--basis", "qubit-hvdl", "--axis", "d", "--values", "2,3,4", "--replicates", "3", "--shots", "1000"],
    );
    assert_eq!(column(&text, "budget"), vec!["3", "8", "15"]);
    assert!(column(&text, "error").iter().all(String::is_empty));
}

#[test]
fn theta_sweep_infidelity_falls_with_angle() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        dir.path(),
        &["--seed", "1", "sweep", "--random", "mixed", "--d", "2", "--state-seed", "3", "--basis", "qubit-hvdl", "--axis", "theta", "--values", "0.05,0.1,0.2,0.4,0.785", "--replicates", "200", "--shots", "10000"],
    );
    let infid: Vec<f64> = column(&text, "mean_infidelity").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(infid.len(), 5);
    assert!(infid.windows(2).all(|w| w[1] < w[0]), "{infid:?}");
}

#[test]
fn sweep_records_failed_points() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        dir.path(),
        &["sweep", "--name", "H", "--d", "2", "--basis", "qubit-hvdl", "--axis", "theta", "--values", "0,0.3", "--replicates", "2"],
    );
    let errors = column(&text, "error");
    assert!(!errors[0].is_empty());
    assert!(errors[1].is_empty());
}

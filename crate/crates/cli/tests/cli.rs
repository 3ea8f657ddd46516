//! End-to-end tests against the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gauge-spectral"));
    cmd.env_remove("GAUGE_SPECTRAL_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_is_deterministic_and_green() {
    let first = run(&["verify", "--seed", "42"]);
    let second = run(&["verify", "--seed", "42"]);
    assert!(first.status.success(), "verify failed:\n{}", stdout_of(&first));
    assert_eq!(first.stdout, second.stdout, "two runs with one seed must agree byte for byte");
    let text = stdout_of(&first);
    assert!(text.ends_with("20/20 checks passed\n"), "tally line:\n{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS ") || l.ends_with("checks passed")));

    let seeded_env = bin()
        .env("GAUGE_SPECTRAL_SEED", "7")
        .arg("verify")
        .output()
        .unwrap();
    let seeded_flag = run(&["verify", "--seed", "7"]);
    assert_eq!(seeded_env.stdout, seeded_flag.stdout, "env seed must equal flag seed");
    assert_ne!(first.stdout, seeded_flag.stdout, "different seeds draw different cases");
}

#[test]
fn apply_projects_through_a_step_function() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write(dir.path(), "m.csv", "0.25,0\n0,0.75\n");
    let out = run(&["apply", "--matrix", &matrix, "--fn", "heaviside:0.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_of(&out), "0,0\n0,1\n", "heaviside projects onto the upper eigenvalue");

    let sq = run(&["apply", "--matrix", &matrix, "--fn", "square", "--eps", "1e-5"]);
    assert!(sq.status.success());
    let text = stdout_of(&sq);
    let first: f64 = text.lines().next().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((first - 0.0625).abs() <= 1e-5, "A^2 entry {first}");
}

#[test]
fn apply_rejects_asymmetric_input() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write(dir.path(), "m.csv", "0,1\n0,0\n");
    let out = run(&["apply", "--matrix", &matrix, "--fn", "identity"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("symmetric"), "diagnostic names the defect: {err}");
}

#[test]
fn spectrum_map_continuum_sees_both_heaviside_levels() {
    let out = run(&["spectrum-map", "--fn", "heaviside:0.5", "--model", "continuum:0,1"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    let points = doc["points"].as_array().unwrap();
    let has = |target: f64| {
        points
            .iter()
            .any(|p| (p[0].as_f64().unwrap() - target).abs() < 1e-12 && p[1].as_f64().unwrap() == 0.0)
    };
    assert!(has(0.0) && has(1.0), "spectrum of the heaviside multiplier: {points:?}");
    assert_eq!(points.len(), 2);
}

#[test]
fn spectrum_map_finite_maps_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write(dir.path(), "m.csv", "0.25,0\n0,0.75\n");
    let out = run(&[
        "spectrum-map",
        "--fn",
        "square",
        "--model",
        "finite",
        "--matrix",
        &matrix,
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    let mut got: Vec<f64> = doc["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p[0].as_f64().unwrap())
        .collect();
    got.sort_by(f64::total_cmp);
    assert_eq!(got, vec![0.0625, 0.5625]);
}

#[test]
fn thomae_demo_gap_column_is_nonincreasing() {
    let out = run(&["thomae-demo", "--levels", "6"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let gaps: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("gap,"))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(gaps.len(), 6);
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "gaps {gaps:?}");
    assert_eq!(*gaps.last().unwrap(), 0.0, "deepest level agrees with itself");
    assert!(text.lines().filter(|l| l.starts_with("sample,")).count() >= 2);
}

#[test]
fn mult_norm_attains_the_sup() {
    let out = run(&["mult-norm", "--fn", "heaviside:0.5", "--grid", "0,1,128"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("operator_norm,sup_norm"));
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row, vec![1.0, 1.0]);
}

#[test]
fn domain_test_atomic_series_certifies_its_sum() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = String::from("lambda,weight\n");
    for k in 1..=60u32 {
        rows.push_str(&format!("{k},{}\n", 2f64.powi(-(k as i32))));
    }
    let atoms = write(dir.path(), "atoms.csv", &rows);
    let out = run(&["domain-test", "--atoms", &atoms, "--fn", "identity", "--eps", "1e-6"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(doc["member"], serde_json::json!(true));
    let partials = doc["partial_sums"].as_array().unwrap();
    let last = partials.last().unwrap().as_f64().unwrap();
    assert!((last - 6.0).abs() <= 1e-9, "sum k^2 2^-k = 6, got {last}");
}

#[test]
fn domain_test_flags_log_divergence() {
    let out = run(&["domain-test", "--density", "power:1.5", "--fn", "identity"]);
    assert!(out.status.success(), "divergence is a verdict, not a failure");
    let doc: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(doc["member"], serde_json::json!(false));
    assert_eq!(doc["bound_used"], serde_json::json!("infinity"));
}

#[test]
fn cauchy_solve_holds_the_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "eq.json",
        r#"{
            "interval": [0.0, 1.0],
            "grid": 8,
            "g": "const:-1",
            "x0": "ones",
            "forcing": {"kind": "const", "value": 1.0},
            "horizon": 5.0,
            "times": [0.1, 1.0],
            "levels": [2, 4, 8],
            "quad_steps": 200
        }"#,
    );
    let out = run(&["cauchy-solve", "--config", &config]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    let mut sections = text.split("\n\n");
    let traj = sections.next().unwrap();
    for line in traj.lines().skip(1) {
        for cell in line.split(',').skip(1) {
            let u: f64 = cell.parse().unwrap();
            assert!((u - 1.0).abs() <= 1e-10, "equilibrium violated: {line}");
        }
    }
    let report = sections.next().expect("report follows on stdout");
    assert!(report.starts_with("level,measured,bound,ok"));
    assert!(report.lines().skip(1).all(|l| l.ends_with("true")));

    let again = run(&["cauchy-solve", "--config", &config]);
    assert_eq!(out.stdout, again.stdout, "same plan, same bytes");
}

#[test]
fn cauchy_solve_reports_real_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "decay.json",
        r#"{
            "interval": [0.0, 1.0],
            "grid": 16,
            "g": "poly:0,-1",
            "x0": "ones",
            "forcing": {"kind": "sin", "freq": 2.0},
            "horizon": 1.0,
            "times": [0.5, 1.0],
            "levels": [2, 4, 8],
            "quad_steps": 64
        }"#,
    );
    let traj_path = dir.path().join("traj.csv");
    let report_path = dir.path().join("report.csv");
    let out = run(&[
        "cauchy-solve",
        "--config",
        &config,
        "--out",
        traj_path.to_str().unwrap(),
        "--report-out",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty(), "both outputs were routed to files");
    let report = fs::read_to_string(&report_path).unwrap();
    let rows: Vec<(f64, f64)> = report
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|&(m, b)| m <= b + 1e-8), "measured within bound: {rows:?}");
    assert!(rows.windows(2).all(|w| w[1].0 <= w[0].0), "gap shrinks with level: {rows:?}");
    let traj = fs::read_to_string(&traj_path).unwrap();
    assert!(traj.starts_with("t,u0,"));
}

#[test]
fn usage_errors_exit_nonzero_with_diagnostics() {
    let unknown = run(&["apply", "--matrix", "x.csv", "--fn", "identity", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2), "unknown flags are rejected");
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("--bogus"));

    let missing = run(&["apply", "--matrix", "x.csv"]);
    assert_eq!(missing.status.code(), Some(2), "missing required option");

    let neither = run(&["domain-test", "--fn", "identity"]);
    assert_eq!(neither.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&neither.stderr).contains("--atoms"));

    let bad_model = run(&["spectrum-map", "--fn", "identity", "--model", "discrete"]);
    assert_eq!(bad_model.status.code(), Some(1));
}

#[test]
fn error_json_is_structured() {
    let out = run(&["--error-json", "apply", "--matrix", "/nonexistent/m.csv", "--fn", "identity"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert!(doc["error"]["message"].as_str().unwrap().contains("m.csv"));

    let dir = tempfile::tempdir().unwrap();
    let matrix = write(dir.path(), "m.csv", "0.25,0\n0,0.75\n");
    let outside = run(&["--error-json", "apply", "--matrix", &matrix, "--fn", "heaviside:9"]);
    assert_eq!(outside.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(stdout_of(&outside).trim()).unwrap();
    assert_eq!(doc["error"]["kind"], serde_json::json!("outside-domain"));
}

#[test]
fn json_function_documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.json",
        r#"{
            "k": [0.0, 1.0],
            "pieces": [{"kind": "const", "c": 2.0}, {"kind": "const", "c": 5.0}],
            "breaks": [{"x": 0.5, "left": 2.0, "right": 5.0, "value": 5.0}]
        }"#,
    );
    let matrix = write(dir.path(), "m.csv", "0.25,0\n0,0.75\n");
    let out = run(&["apply", "--matrix", &matrix, "--fn", &f]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_of(&out), "2,0\n0,5\n");
}

use std::collections::HashMap;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvtradeoff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], workers: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvtradeoff"))
        .args(args)
        .env("CVTRADEOFF_WORKERS", workers)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and rows of a CSV table keyed by column name.
fn csv(text: &str) -> Vec<HashMap<String, String>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| {
            header
                .iter()
                .map(|h| h.to_string())
                .zip(l.split(',').map(String::from))
                .collect()
        })
        .collect()
}

fn num(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key} = {:?}", row[key]))
}

fn sig_digits(s: &str) -> usize {
    let mantissa = s.split('e').next().unwrap();
    mantissa
        .chars()
        .filter(char::is_ascii_digit)
        .collect::<String>()
        .trim_start_matches('0')
        .len()
}

#[test]
fn curve_single_point() {
    let rows = csv(&stdout(&run(&["curve", "--grid", "0.25"])));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["G"], "0.428571429");
    assert_eq!(rows[0]["F"], "0.75");
    assert_eq!(rows[0]["F_bound"], "0.75");
}

#[test]
fn curve_sweep_saturates() {
    let text = stdout(&run(&["curve", "--grid", "0.01:0.99:0.01"]));
    assert!(text.starts_with("T,var_m,var_n,G,F,F_bound\n"));
    let rows = csv(&text);
    assert_eq!(rows.len(), 99);
    for r in &rows {
        assert!((num(r, "F") - num(r, "F_bound")).abs() < 1e-8);
        for v in r.values() {
            assert!(sig_digits(v) <= 9, "{v}");
        }
    }
}

#[test]
fn curve_degraded_below_ideal() {
    let rows = csv(&stdout(&run(&[
        "curve",
        "--grid",
        "0.05:0.95:0.05",
        "--degraded",
        "0.95,0.99",
    ])));
    assert_eq!(rows.len(), 19);
    for r in &rows {
        assert!(num(r, "F_degraded") <= num(r, "F"));
        assert!(num(r, "G_degraded") <= num(r, "G"));
    }
}

#[test]
fn curve_bad_grid_is_usage_error() {
    for grid in ["0:0.5:0.1", "0.5:0.1:0.1", "0.1:0.9:0", "x", "0.2,1"] {
        assert_eq!(run(&["curve", "--grid", grid]).status.code(), Some(2), "{grid}");
    }
    assert_eq!(run(&["curve"]).status.code(), Some(2));
}

#[test]
fn scheme_and_teleport() {
    let s = &csv(&stdout(&run(&["scheme", "--T", "0.25"])))[0];
    assert_eq!(s["var_n"], "0.666666667");
    assert_eq!(s["var_m"], "1.66666667");
    assert_eq!(s["lambda"], "0.816496581");
    let t = &csv(&stdout(&run(&["teleport", "--r", "1.0"])))[0];
    assert!((num(t, "F") - 0.880797078).abs() < 1e-9);
    assert!((num(t, "F") - num(t, "F_bound")).abs() < 1e-9);
    assert_eq!(run(&["scheme", "--T", "1.0"]).status.code(), Some(2));
    assert_eq!(run(&["teleport", "--r", "-1"]).status.code(), Some(2));
}

#[test]
fn json_is_schema_versioned() {
    let v: Value = serde_json::from_str(&stdout(&run(&["scheme", "--T", "0.25", "--format", "json"]))).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "scheme");
    assert_eq!(v["columns"][0], "T");
    assert_eq!(v["records"][0]["F"], 0.75);
}

#[test]
fn mc_converges_and_is_deterministic() {
    let args = [
        "mc", "--T", "0.25", "--amp", "3,-2", "--shots", "1000000", "--seed", "42",
    ];
    let a = stdout(&run_env(&args, "1"));
    let b = stdout(&run_env(&args, "3"));
    assert_eq!(a, b);
    let r = &csv(&a)[0];
    assert!((num(r, "F_hat") - 0.75).abs() <= 0.005);
    assert!((num(r, "G_hat") - 3.0 / 7.0).abs() <= 0.005);
    assert!((num(r, "gain_x") - 1.0).abs() <= 0.01);
    assert!((num(r, "gain_p") - 1.0).abs() <= 0.01);
    assert_eq!(r["F"], "0.75");
}

#[test]
fn mc_vacuum_flags_gain() {
    let o = run(&[
        "mc", "--T", "0.5", "--amp", "0,0", "--shots", "100000", "--seed", "7", "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rec = &v["records"][0];
    assert_eq!(rec["gain_defined"], false);
    assert!(rec["gain_x"].is_null() && rec["gain_p"].is_null());
    assert!(rec["var_n_hat"].as_f64().unwrap() > 0.0);
    let row = &csv(&stdout(&run(&[
        "mc", "--T", "0.5", "--amp", "0,0", "--shots", "1000", "--seed", "7",
    ])))[0];
    assert_eq!(row["gain_x"], "");
}

#[test]
fn mc_requires_seed() {
    assert_eq!(
        run(&["mc", "--T", "0.25", "--amp", "3,-2", "--shots", "1000"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["mc", "--T", "0.25", "--amp", "3,-2", "--shots", "10", "--seed", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn lossy_modes() {
    let r = &csv(&stdout(&run(&["lossy", "--eta", "0.31", "--optimize"])))[0];
    assert!((num(r, "T_star") - 0.31).abs() < 1e-6);
    assert!((num(r, "F_star") - 1.0 / 1.69).abs() < 1e-8);
    assert_eq!(r["strategy"], "hybrid");
    let e = &csv(&stdout(&run(&["lossy", "--eta", "0.31", "--T", "0.31"])))[0];
    assert_eq!(e["F"], "0.591715976");
    assert_eq!(run(&["lossy", "--eta", "0.31"]).status.code(), Some(2));
}

#[test]
fn erasure_modes() {
    let r = &csv(&stdout(&run(&["erasure", "--p", "0.5", "--optimize"])))[0];
    assert!((num(r, "T_star") - 0.405).abs() < 1e-3);
    assert!((num(r, "F_star") - 0.5956194).abs() < 1e-6);
    let e = &csv(&stdout(&run(&["erasure", "--p", "0.5", "--T", "0.405"])))[0];
    assert!((num(e, "F") - 0.5956).abs() < 1e-4);
    let q = &csv(&stdout(&run(&["erasure", "--p", "0.9", "--optimize"])))[0];
    assert_eq!(q["strategy"], "quantum");
    assert_eq!(q["F_star"], "0.9");
    assert_eq!(run(&["erasure", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(
        run(&["erasure", "--p", "0.5", "--T", "0.4", "--optimize"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["erasure", "--p", "1.5", "--optimize"]).status.code(), Some(2));
}

#[test]
fn noise_decision() {
    for (chi, s) in [("1.0", "quantum"), ("2.0", "tie"), ("3", "classical")] {
        assert_eq!(csv(&stdout(&run(&["noise-decision", "--chi", chi])))[0]["strategy"], s);
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# erasure sweep\ncommand = erasure\np = 0.5\nT = 0.405\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = &csv(&stdout(&run(&["--config", c])))[0];
    assert_eq!(from_file["T"], "0.405");
    let over = &csv(&stdout(&run(&["--config", c, "erasure", "--p", "0.7"])))[0];
    assert_eq!(over["p"], "0.7");
    assert_eq!(over["T"], "0.405");

    std::fs::write(
        &cfg,
        "command = mc\nT = 0.25\namp = 3,-2\nshots = 2000\nseed = 5\nformat = json\n",
    )
    .unwrap();
    let v: Value = serde_json::from_str(&stdout(&run(&["--config", c]))).unwrap();
    assert_eq!(v["records"][0]["seed"], 5);
    let v: Value = serde_json::from_str(&stdout(&run(&["--config", c, "mc", "--seed", "6"]))).unwrap();
    assert_eq!(v["records"][0]["seed"], 6);
}

#[test]
fn config_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    let c = cfg.to_str().unwrap();
    for text in [
        "command = scheme\nr = 1\n",
        "command = scheme\nT 0.2\n",
        "command = nope\n",
        "T = 0.2\n",
    ] {
        std::fs::write(&cfg, text).unwrap();
        assert_eq!(run(&["--config", c]).status.code(), Some(2), "{text:?}");
    }
    assert_eq!(
        run(&["--config", "/nonexistent/run.cfg", "scheme", "--T", "0.2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn out_file_and_format_inference() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("curve.json");
    let o = run(&["curve", "--grid", "0.25,0.5", "--out", json.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 2);
    let csv_path = dir.path().join("curve.csv");
    stdout(&run(&["curve", "--grid", "0.25", "--out", csv_path.to_str().unwrap()]));
    assert!(std::fs::read_to_string(&csv_path).unwrap().starts_with("T,var_m"));
}

#[test]
fn unknown_flags_are_usage_errors() {
    assert_eq!(run(&["scheme", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

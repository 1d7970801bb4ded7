use std::path::Path;
use std::process::{Command, Output};

use posmet::config::DEFAULT_CONFIG;

fn posmet(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_posmet"));
    c.args(args).env_clear();
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn qfi_positronium_is_four() {
    let v = json(&posmet(&["qfi", "--axis", "0.3,1.1", "--reproducible"], &[]));
    assert!((v["result"]["fi"].as_f64().unwrap() - 4.0).abs() < 1e-6);
    let v = json(&posmet(&["qfi", "--effective-separable", "--reproducible"], &[]));
    assert!((v["effective_separable"]["effective_qfi_closed"].as_f64().unwrap() - 1.2).abs() < 1e-5);
}

#[test]
fn reproducible_output_is_byte_identical() {
    let args = ["experiment", "--shots", "300", "--alpha-points", "13", "--seed", "5", "--reproducible"];
    let a = posmet(&args, &[]);
    let b = posmet(&args, &[("POSMET_EXPERIMENT__THREADS", "3")]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("generated_unix_s"));
    let c = json(&posmet(&["experiment", "--shots", "300", "--alpha-points", "13"], &[]));
    assert!(c["generated_unix_s"].is_u64() && c["runtime_s"].is_f64());
}

#[test]
fn seed_changes_shots() {
    let a = posmet(&["shots", "--shots", "50", "--alpha", "0.8", "--seed", "1", "--format", "csv"], &[]);
    let b = posmet(&["shots", "--shots", "50", "--alpha", "0.8", "--seed", "2", "--format", "csv"], &[]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("shot_index,qubit_bit,antiqubit_bit\n"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"version\": 1,\n  \"device\": ,\n}").unwrap();
    let out = posmet(&["qfi", "--config", bad.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let out = posmet(&["qfi"], &[("POSMET_NOISE__PREP_FIDELITY", "2")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("noise.prep_fidelity"));

    let out = posmet(&["qfi", "--config", "/nonexistent/posmet.json"], &[]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(posmet(&["qfi", "--axis", "w"], &[]).status.code(), Some(2));
    assert_eq!(posmet(&["frobnicate"], &[]).status.code(), Some(2));
    assert_eq!(posmet(&["--version"], &[]).status.code(), Some(0));
}

#[test]
fn config_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, DEFAULT_CONFIG.replace("\"seed\": 20240601", "\"seed\": 77")).unwrap();
    let v = json(&posmet(&["shots", "--shots", "10", "--config", path.to_str().unwrap(), "--reproducible"], &[]));
    assert_eq!(v["seed"], 77);
}

#[test]
fn magic_freq_reports_and_fails_across_pole() {
    let v = json(&posmet(&["magic-freq", "--reproducible"], &[]));
    assert!((v["variants"][0]["magic_ghz"].as_f64().unwrap() - 4.19742).abs() < 1e-4);
    assert!(v["poles_ghz"]["qubit"].is_array());
    let out = posmet(&["magic-freq", "--window", "4.15,4.18"], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("pole"), "{}", stderr(&out));
}

#[test]
fn numerical_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.csv");
    let mut text = String::from("alpha_rad,outcome_frequency,shot_count\n");
    for i in 0..3 {
        text.push_str(&format!("{},0.5,100\n", 0.1 * i as f64));
    }
    std::fs::write(&path, text).unwrap();
    let out = posmet(&["fit", "--input", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("fit"));
}

#[test]
fn fit_recovers_ideal_fringe() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fringe.csv");
    let mut text = String::from("alpha_rad,outcome_frequency,shot_count\n");
    for i in 0..25 {
        let a = 2.0 * std::f64::consts::PI * i as f64 / 24.0;
        text.push_str(&format!("{a},{},1000\n", 0.5 + 0.45 * (2.0 * a).cos()));
    }
    std::fs::write(&path, text).unwrap();
    let v = json(&posmet(&["fit", "--input", path.to_str().unwrap(), "--reproducible"], &[]));
    assert!((v["A"].as_f64().unwrap() - 0.45).abs() < 1e-8);
    assert!(v["fi"].as_f64().unwrap() < 4.0 && v["fi"].as_f64().unwrap() > 3.0);
    assert_eq!(v["k"], 2);
}

#[test]
fn csv_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = posmet(&["protocols-table", "--format", "csv", "--output", path.to_str().unwrap()], &[]);
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(Path::new(&path)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("protocol,fi,v_st,fi_per_two_vst"));
    assert!(lines.any(|l| l.starts_with("positronium_sequential_n3,36")));
}

#[test]
fn sweep_shot_column_tracks_probability() {
    let v = json(&posmet(&["sweep", "--axis", "z", "--alpha-points", "7", "--shots", "20000", "--reproducible"], &[]));
    for row in v["rows"].as_array().unwrap() {
        let p = row["probability"].as_f64().unwrap();
        let f = row["shot_frequency"].as_f64().unwrap();
        assert!((p - f).abs() < 5.0 * (p * (1.0 - p) / 20000.0).sqrt() + 1e-3, "{row}");
    }
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn polqec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polqec"))
        .args(args)
        .env_remove("POLQEC_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn summary_schema() {
    let v = json(&polqec(&["compare-setups", "--trials", "1000"]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["config_echo", "experiment", "metrics", "seed", "version"]);
    assert_eq!(v["experiment"], "compare-setups");
    assert_eq!(v["seed"], 1);
    assert!(v["metrics"]["max_infidelity"].as_f64().unwrap() < 1e-12);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["bb84", "--trials", "20000", "--seed", "7", "--pe", "0.2"];
    let a = polqec(&args);
    let b = polqec(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = polqec(&["bb84", "--trials", "20000", "--seed", "8", "--pe", "0.2"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_polqec"));
        cmd.args(["compare-setups", "--trials", "5"]).args(extra);
        match env {
            Some(s) => cmd.env("POLQEC_SEED", s),
            None => cmd.env_remove("POLQEC_SEED"),
        };
        json(&cmd.output().unwrap())["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, &[]), 1);
    assert_eq!(run(Some("42"), &[]), 42);
    assert_eq!(run(Some("42"), &["--seed", "9"]), 9);
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "pe = 0.25\ntrials = 300\nseed = 11\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let v = json(&polqec(&["bb84", "--config", cfg]));
    assert_eq!(v["config_echo"]["pe"], 0.25);
    assert_eq!(v["config_echo"]["trials"], 300);
    assert_eq!(v["seed"], 11);

    let v = json(&polqec(&["bb84", "--config", cfg, "--pe", "0.1"]));
    assert_eq!(v["config_echo"]["pe"], 0.1);
    assert_eq!(v["config_echo"]["trials"], 300);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "trials = 10\npee = 0.2\n").unwrap();
    let out = polqec(&["bb84", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("pee"), "{}", stderr(&out));

    let out = polqec(&["bb84", "--pe", "0.7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("[0, 0.5]"));

    let out = polqec(&["bb84", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = polqec(&["mesoscopic", "--m-bases", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_errors_exit_3() {
    let out = polqec(&["bb84", "--config", "/definitely/not/here.toml"]);
    assert_eq!(out.status.code(), Some(3));
    let out = polqec(&["compare-setups", "--trials", "2", "--json", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(3));
    let out = polqec(&["compare-setups", "--trials", "2", "--csv", "/definitely/not/here.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fpb_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let json_path = dir.path().join("sweep.json");
    let out = polqec(&[
        "fpb-sweep",
        "--pe-grid",
        "0:0.5:0.025",
        "--trials",
        "3",
        "--csv",
        csv_path.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(stderr(&out).starts_with("fpb-sweep:"));
    assert_eq!(stderr(&out).lines().count(), 1);

    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "pe");
    assert_eq!(&headers[1], "qber");
    assert_eq!(&headers[2], "eve_success");
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 21);
    let quarter = rows
        .iter()
        .find(|r| (r[0].parse::<f64>().unwrap() - 0.25).abs() < 1e-12)
        .unwrap();
    assert!((quarter[2].parse::<f64>().unwrap() - 0.853553).abs() < 1e-6);
    // 17 significant digits in scientific notation
    let mantissa = quarter[2].split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);

    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(v["metrics"]["argmax_pe"], 0.25);
}

#[test]
fn every_experiment_runs() {
    let dir = tempfile::tempdir().unwrap();
    for (exp, trials) in [
        ("correct-single", "50"),
        ("compare-setups", "50"),
        ("fpb-sweep", "1"),
        ("bb84", "500"),
        ("passive-coherent", "10"),
        ("mesoscopic", "4"),
        ("distinguishability", "10"),
    ] {
        let csv_path = dir.path().join(format!("{exp}.csv"));
        let v = json(&polqec(&[exp, "--trials", trials, "--csv", csv_path.to_str().unwrap()]));
        assert_eq!(v["experiment"], exp);
        assert!(Path::new(&csv_path).exists());
    }
}

#[test]
fn fixed_channel_flags() {
    let v = json(&polqec(&["correct-single", "--trials", "200", "--phi", "0", "--lambda", "1.5", "--xi", "0:1"]));
    assert_eq!(v["metrics"]["port1_frequency"], 1.0);
    assert_eq!(v["config_echo"]["channel"]["phi_mix"]["fixed"], 0.0);
    let out = polqec(&["correct-single", "--phi", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn self_check_passes() {
    let out = polqec(&["--check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
    assert!(text.lines().count() >= 10);
    assert_eq!(polqec(&["check", "--seed", "5"]).status.code(), Some(0));
}

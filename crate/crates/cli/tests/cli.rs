use std::process::{Command, Output};

fn ocp2d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ocp2d"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn kernel_eval_at_one_particle() {
    let out = ocp2d(&[
        "kernel",
        "eval",
        "--n",
        "1",
        "--z",
        "0,0",
        "--w",
        "0,0",
        "--particles",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let re = v["re"].as_f64().unwrap();
    assert!((re - 1.0 / std::f64::consts::PI).abs() < 1e-15);
    assert!(v["index_convention"].as_str().unwrap().contains("J particles"));
}

#[test]
fn translate_csv_has_header_and_passes() {
    let out = ocp2d(&["--format", "csv", "experiment", "translate"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert!(lines.next().unwrap().starts_with("# index_convention:"));
    assert_eq!(lines.next().unwrap(), "# generator: ChaCha20");
    assert!(text.lines().any(|l| l.starts_with("N,M,a_re,a_im")));
    assert!(!text.contains('\r'));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ginibre.json");
    let out = ocp2d(&[
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
        "experiment",
        "ginibre-asymptotics",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["generator_name"], "ChaCha20");
    assert!(!v["table"]["rows"].as_array().unwrap().is_empty());
}

#[test]
fn battery_is_reproducible() {
    let args = ["oracle", "battery", "--samples", "20000", "--seed", "7"];
    let a = ocp2d(&args);
    let b = ocp2d(&args);
    assert_eq!(a.status.code(), b.status.code());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let other = ocp2d(&["oracle", "battery", "--samples", "20000", "--seed", "8"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn zero_tolerance_fails_the_battery() {
    let out = ocp2d(&["oracle", "battery", "--samples", "20000", "--tolerance-scale", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("check failed"));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"bogus": 1}"#).unwrap();
    let out = ocp2d(&["--config", bad.to_str().unwrap(), "experiment", "translate"]);
    assert_eq!(out.status.code(), Some(2));

    let out = ocp2d(&[
        "--config",
        dir.path().join("missing.json").to_str().unwrap(),
        "experiment",
        "translate",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let grid = dir.path().join("grid.json");
    std::fs::write(&grid, r#"{"scale_grid": [200, 100]}"#).unwrap();
    let out = ocp2d(&["--config", grid.to_str().unwrap(), "experiment", "translate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_overlay_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("rotate.json");
    std::fs::write(&cfg, r#"{"scale_grid": [100, 200], "rotations": [0.0, 0.7]}"#).unwrap();
    let out = ocp2d(&[
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "experiment",
        "rotate",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["config"]["scale_grid"], serde_json::json!([100.0, 200.0]));
}

#[test]
fn mc_partition_reports_exact_value() {
    let out = ocp2d(&["oracle", "mc-partition", "--samples", "50000"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["exact_log_z"].is_number());
    assert_eq!(v["samples"], 50000);
}

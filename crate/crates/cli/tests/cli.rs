use std::path::PathBuf;
use std::process::{Command, Output};

fn cbnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbnorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cbnorm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const MEASURE: &str = r#"{"version":1,"p":1,"m":3,"coeffs":[[[1,0]],[[0.5,0.5]],[[-0.3,0]]]}"#;

#[test]
fn cb_gap_report_is_deterministic_and_carries_the_bound() {
    let args = [
        "experiment",
        "cb-gap",
        "-n",
        "4",
        "-p",
        "2",
        "--trials",
        "2",
        "--seed",
        "1",
        "--restarts",
        "2",
    ];
    let a = cbnorm(&args);
    let b = cbnorm(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let mut ra: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let mut rb: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    let bound = ra["pisier_bound"].as_f64().unwrap();
    assert!((bound - 1.1547005).abs() < 1e-7);
    ra["wall_clock_s"] = 0.0.into();
    rb["wall_clock_s"] = 0.0.into();
    assert_eq!(ra.to_string(), rb.to_string());
}

#[test]
fn dilating_a_non_contraction_is_a_validation_error() {
    let path = scratch("big.json", r#"{"rows":1,"cols":1,"entries":[[2,0]]}"#);
    let out = cbnorm(&["dilate", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a contraction"));
}

#[test]
fn dilation_output_is_unitary() {
    let path = scratch(
        "small.json",
        r#"{"rows":2,"cols":2,"entries":[[0.5,0],[0,0.3],[0,0],[0.2,0]]}"#,
    );
    let out = cbnorm(&["dilate", "--input", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["unitarity_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["compression_exact"], true);
    assert_eq!(v["dilation"]["rows"], 4);
}

#[test]
fn norm_csv_lists_every_kind_and_is_reproducible() {
    let path = scratch("mu.json", MEASURE);
    let args = [
        "norm",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "csv",
        "--restarts",
        "3",
    ];
    let a = cbnorm(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, cbnorm(&args).stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let kinds: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(kinds, ["min", "max", "ball", "sd"]);
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(values.iter().all(|v| (v - values[0]).abs() < 1e-6));
}

#[test]
fn embed_reports_exact_identities_and_saves_the_sample() {
    let mu = scratch("mu-embed.json", MEASURE);
    let saved = mu.with_file_name("sample.json");
    let out = cbnorm(&[
        "embed",
        "--measure",
        mu.to_str().unwrap(),
        "--extend",
        "3",
        "--save-sample",
        saved.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sample_size"], 102);
    assert!(v["duality_max_error"].as_f64().unwrap() <= 1e-10);
    assert!(v["restriction_max_error"].as_f64().unwrap() <= 1e-10);
    assert!(v["point_mass_max_residual"].as_f64().unwrap() <= 1e-9);

    let again = cbnorm(&[
        "embed",
        "--measure",
        mu.to_str().unwrap(),
        "--sample",
        saved.to_str().unwrap(),
    ]);
    let w: serde_json::Value = serde_json::from_slice(&again.stdout).unwrap();
    assert_eq!(w["truncated_sd_norm"], v["truncated_sd_norm"]);
}

#[test]
fn config_file_and_bad_flags() {
    let cfg = scratch("cfg.toml", "restarts = 2\nmax_iters = 50\n");
    let mu = scratch("mu-cfg.json", MEASURE);
    let ok = cbnorm(&[
        "norm",
        "--input",
        mu.to_str().unwrap(),
        "--kind",
        "max",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let bad = scratch("bad.toml", "step_size = -1.0\n");
    let out = cbnorm(&[
        "norm",
        "--input",
        mu.to_str().unwrap(),
        "--config",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(cbnorm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        cbnorm(&["experiment", "cb-gap", "-n", "1", "-p", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn convergence_csv_has_one_row_per_stage() {
    let out = cbnorm(&[
        "experiment",
        "embedding-convergence",
        "--schedule",
        "1,10,20",
        "--format",
        "csv",
        "--restarts",
        "2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blockmean"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn blockmean")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON on stdout: {e}\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("blockmean-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn estimate_constant_column() {
    let dir = temp_dir("const");
    let csv = "7.0\n".repeat(1000);
    let input = write_file(&dir, "data.csv", &csv);
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "10",
        "--delta",
        "1.0",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    let estimate = v["result"]["estimate"].as_f64().unwrap();
    assert!((estimate - 7.0).abs() < 1e-9);
    // resolved config and seed are echoed
    assert_eq!(v["result"]["config"]["k"], 10);
    assert!(v["result"]["config"]["seed"].is_u64());
}

#[test]
fn estimate_auto_delta_matches_library() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    // heavy-ish tails from a ratio of uniforms
    let sample: Vec<f64> = (0..2000)
        .map(|_| {
            let u: f64 = rng.random::<f64>() - 0.5;
            let v: f64 = rng.random::<f64>() + 0.05;
            u / v
        })
        .collect();
    let dir = temp_dir("auto");
    let csv: String = sample.iter().map(|x| format!("{x}\n")).collect();
    let input = write_file(&dir, "data.csv", &csv);
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "10",
        "--delta",
        "auto:mom_like",
        "--seed",
        "5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    let delta = v["delta_resolved"].as_f64().unwrap();
    let expected_delta =
        blockmean::default_delta(&sample, 10, blockmean::DeltaRegime::MomLike, 5).unwrap();
    assert!((delta - expected_delta).abs() < 1e-12);
    let cfg = blockmean::EstimatorConfig::new(10, expected_delta).with_seed(5);
    let expected = blockmean::estimate_block_huber(&sample, &cfg).unwrap();
    assert_eq!(v["result"]["estimate"].as_f64().unwrap(), expected.estimate);
    assert_eq!(
        v["result"]["scheme_digest"].as_str().unwrap(),
        expected.scheme_digest
    );
}

#[test]
fn missing_file_is_io_error() {
    let out = run(&[
        "estimate",
        "--input",
        "/nonexistent/definitely-missing.csv",
        "--k",
        "2",
        "--delta",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "io");
}

#[test]
fn malformed_csv_reports_line_number() {
    let dir = temp_dir("malformed");
    let input = write_file(&dir, "bad.csv", "1.0\n2.0\nnot-a-number\n4.0\n");
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "2",
        "--delta",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "parse");
    assert_eq!(v["line"], 3);
}

#[test]
fn non_finite_entry_is_numeric_error() {
    let dir = temp_dir("nonfinite");
    let input = write_file(&dir, "inf.csv", "1.0\ninf\n3.0\n");
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "2",
        "--delta",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "numeric");
}

#[test]
fn bad_config_flag_is_exit_3() {
    let out = run(&["estimate", "--k", "2", "--delta", "1.0"]); // missing --input
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "config");
}

#[test]
fn estimate_mv_runs_on_two_columns() {
    let dir = temp_dir("mv");
    let mut csv = String::new();
    for i in 0..400 {
        let x = (i % 5) as f64;
        csv.push_str(&format!("{},{}\n", 1.0 + 0.1 * x, -2.0 + 0.1 * x));
    }
    let input = write_file(&dir, "mv.csv", &csv);
    let out = run(&[
        "estimate-mv",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "8",
        "--delta",
        "5.0",
        "--directions",
        "4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    let mu = v["solution"]["mu_hat"].as_array().unwrap();
    assert_eq!(mu.len(), 2);
    assert!((mu[0].as_f64().unwrap() - 1.2).abs() < 0.1);
    assert!((mu[1].as_f64().unwrap() + 1.8).abs() < 0.1);
}

const USTAT_CONFIG: &str = r#"{
  "dist": { "family": "normal", "mean": 0.0, "std": 1.0 },
  "sample_size": 12,
  "subset_size": 3,
  "delta": 2.0,
  "incomplete_draws": [50],
  "replications": 100,
  "master_seed": 7
}"#;

#[test]
fn study_ustat_agreement_and_byte_identical_rerun() {
    let dir = temp_dir("ustat");
    let config = write_file(&dir, "ustat.json", USTAT_CONFIG);
    let out1 = dir.join("run1");
    let out2 = dir.join("run2");
    for out_dir in [&out1, &out2] {
        let out = run(&[
            "study-ustat",
            "--config",
            config.to_str().unwrap(),
            "--output-dir",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    }
    let csv1 = std::fs::read(out1.join("ustat.csv")).unwrap();
    let csv2 = std::fs::read(out2.join("ustat.csv")).unwrap();
    assert_eq!(csv1, csv2, "rerun must be byte-identical");

    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out1.join("ustat_summary.json")).unwrap()).unwrap();
    let max_gap = summary["report"]["max_exact_dedup_gap"].as_f64().unwrap();
    assert!(max_gap <= 1e-12, "max gap {max_gap}");
    // self-describing artifact: full config and seed embedded
    assert_eq!(summary["config"]["master_seed"], 7);
}

#[test]
fn study_config_with_unknown_key_rejected() {
    let dir = temp_dir("unknown-key");
    let config = write_file(
        &dir,
        "bad.json",
        &USTAT_CONFIG.replace("\"master_seed\": 7", "\"master_seed\": 7, \"bogus\": 1"),
    );
    let out = run(&[
        "study-ustat",
        "--config",
        config.to_str().unwrap(),
        "--output-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "config");
    assert!(v["message"].as_str().unwrap().contains("bogus"));
}

#[test]
fn study_contamination_small_k_rejected() {
    let dir = temp_dir("contam-k");
    let config = write_file(
        &dir,
        "contam.json",
        r#"{
  "dist": { "family": "normal", "mean": 0.0, "std": 1.0 },
  "sample_size": 1000,
  "dim": 2,
  "eps_grid": [0.05],
  "k_factor": 1.5,
  "delta_rule": { "fixed_sigma_multiple": { "multiplier": 1.0 } },
  "m_directions": 4,
  "solver_tol": 0.001,
  "strategies": [ { "strategy": "point_mass", "value": 1e6 } ],
  "baseline_point_mass": 1e6,
  "replications": 100,
  "master_seed": 1
}"#,
    );
    let out = run(&[
        "study-contamination",
        "--config",
        config.to_str().unwrap(),
        "--output-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert!(
        v["message"].as_str().unwrap().contains("k > 2*O"),
        "{}",
        v["message"]
    );
}

#[test]
fn validate_score_and_config() {
    let out = run(&["validate", "--score", "huber"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["valid"], true);

    let dir = temp_dir("validate");
    let config = write_file(&dir, "ustat.json", USTAT_CONFIG);
    let out = run(&[
        "validate",
        "--study",
        "ustat",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["config"]["sample_size"], 12);
}

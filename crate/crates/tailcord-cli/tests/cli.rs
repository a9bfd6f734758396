//! End-to-end tests of the command-line surface: file schemas, row counts,
//! byte determinism, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tailcord"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

#[test]
fn simulate_row_count_and_determinism() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = [
        "--output-dir", d, "--n", "400", "--replicates", "2", "--k", "1", "simulate",
    ];
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let first = read(dir.path(), "replicates.csv");
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines[0], "replicate,k,v1,v2");
    assert_eq!(lines.len(), 3, "2 replicates x 1 k = 2 data rows");

    // rerun: byte-identical; a different thread count must not change bytes
    run(&args);
    assert_eq!(first, read(dir.path(), "replicates.csv"));
    let out = bin()
        .args(["--threads", "3"])
        .args(args)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(first, read(dir.path(), "replicates.csv"));
}

#[test]
fn simulate_multi_k_rows() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "--output-dir", dir.path().to_str().unwrap(),
        "--n", "300", "--replicates", "5", "--k", "1,10,50", "simulate",
    ]);
    assert!(out.status.success());
    let text = read(dir.path(), "replicates.csv");
    assert_eq!(text.lines().count(), 1 + 5 * 3);
}

#[test]
fn limit_surface_grid_rows_and_corner() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    // config with a tight quadrature so the corner resolves within 1e-6
    let cfg = serde_json::json!({
        "quad": {"abs_tol": 1e-13, "rel_tol": 1e-13, "max_subdivisions": 400},
        "k_list": [10],
    });
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();

    let out = run(&[
        "--config", cfg_path.to_str().unwrap(),
        "--output-dir", d,
        "--grid", "1000000,1000000,1000000,1000000,1",
        "limit-surface",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "limit_cdf.csv");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "v1,v2,cdf,quad_error");
    assert_eq!(lines.len(), 2);
    let cdf: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((cdf - 1.0).abs() <= 1e-6, "corner cdf {cdf}");

    // a 5x5 grid produces 25 rows
    let out = run(&[
        "--output-dir", d, "--grid", "0.5,3.0,0.5,3.0,5", "limit-surface",
    ]);
    assert!(out.status.success());
    assert_eq!(read(dir.path(), "limit_cdf.csv").lines().count(), 26);
}

#[test]
fn finite_oracle_runs_on_rect_grid() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "--output-dir", dir.path().to_str().unwrap(),
        "--n", "100", "--k", "5",
        "--grid", "50,400,20,100,3",
        "finite-oracle",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "oracle_cdf.csv");
    assert_eq!(text.lines().next().unwrap(), "v1,v2,cdf,quad_error");
    assert_eq!(text.lines().count(), 10);
    for line in text.lines().skip(1) {
        let cdf: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&cdf));
        let err: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(err >= 0.0, "flagged row: {line}");
    }
}

#[test]
fn validate_self_test_is_exact_and_schema_complete() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "--output-dir", dir.path().to_str().unwrap(),
        "--n", "300", "--replicates", "40", "--k", "5",
        "--surface", "self-test",
        "validate",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("max_abs_error = 0"), "stdout: {stdout}");

    let errors = read(dir.path(), "errors.csv");
    assert_eq!(errors.lines().next().unwrap(), "v1,v2,empirical,theoretical,abs_error");
    assert_eq!(errors.lines().count(), 41);

    // the report satisfies the shipped schema's required-key lists
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    let schema: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/report.schema.json"),
        )
        .unwrap(),
    )
    .unwrap();
    for key in schema["required"].as_array().unwrap() {
        assert!(
            report.get(key.as_str().unwrap()).is_some(),
            "report missing {key}"
        );
    }
    for key in schema["properties"]["metadata"]["required"].as_array().unwrap() {
        assert!(
            report["metadata"].get(key.as_str().unwrap()).is_some(),
            "metadata missing {key}"
        );
    }
    assert_eq!(report["max_abs_error"].as_f64().unwrap(), 0.0);
    assert_eq!(report["metadata"]["replicate_count"].as_u64().unwrap(), 40);
    assert_eq!(report["point_errors"].as_array().unwrap().len(), 40);
    assert_eq!(report["marginal_l1_v1"].as_array().unwrap().len(), 100);
}

#[test]
fn ksweep_single_k_matches_validate() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let common = [
        "--output-dir", d, "--n", "200", "--replicates", "30", "--k", "1", "--seed", "9",
    ];
    let out = bin().args(common).arg("validate").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    let max_err = report["max_abs_error"].as_f64().unwrap();

    let out = bin().args(common).arg("ksweep").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sweep = read(dir.path(), "ksweep.csv");
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines[0], "k,v1_median,v2_median,v2_q90,max_abs_error");
    assert_eq!(lines.len(), 2);
    let sweep_err: f64 = lines[1].split(',').nth(4).unwrap().parse().unwrap();
    assert_eq!(sweep_err, max_err, "single-element sweep equals validate");

    // deterministic across reruns
    bin().args(common).arg("ksweep").output().unwrap();
    assert_eq!(sweep, read(dir.path(), "ksweep.csv"));
}

#[test]
fn gaussian_constants_and_tail_csv() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    // empty y grid: constants table only, exit 0
    let out = run(&[
        "--output-dir", d, "--n", "100000", "--rho", "0.5", "--y-grid", "", "gaussian",
    ]);
    assert!(out.status.success());
    let norming = read(dir.path(), "norming.csv");
    let lines: Vec<&str> = norming.lines().collect();
    assert_eq!(lines[0], "n,rho,a_n,b_n,a_tilde_n,b_tilde_n,a_tilde_nE,b_tilde_nE");
    let b_n: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    assert!((b_n - 4.28019).abs() <= 1e-4, "b_n = {b_n}");
    assert!(!dir.path().join("gauss_tail.csv").exists());

    let out = run(&[
        "--output-dir", d, "--n", "100000", "--rho", "0.5",
        "--y-grid", "2,3", "--threshold-u", "11.5129", "--tail-samples", "20000",
        "gaussian",
    ]);
    assert!(out.status.success());
    let tail = read(dir.path(), "gauss_tail.csv");
    let lines: Vec<&str> = tail.lines().collect();
    assert_eq!(lines[0], "y,empirical,limit,mills,rel_gap");
    assert_eq!(lines.len(), 3);
    let limit: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((limit - 0.12098536).abs() < 1e-6, "limit column {limit}");
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = serde_json::json!({
        "model": {"family": "logistic-frechet", "gamma": 0.5},
        "n": 250,
        "replicates": 4,
        "k_list": [2],
        "seed": 5,
    });
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let d = dir.path().to_str().unwrap();

    let out = run(&["--config", cfg_path.to_str().unwrap(), "--output-dir", d, "simulate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let base = read(dir.path(), "replicates.csv");
    assert_eq!(base.lines().count(), 5);

    // a flag overrides the file value: different seed, different draws
    let out = run(&[
        "--config", cfg_path.to_str().unwrap(), "--output-dir", d, "--seed", "6", "simulate",
    ]);
    assert!(out.status.success());
    assert_ne!(base, read(dir.path(), "replicates.csv"));
}

#[test]
fn failed_quadrature_rows_are_flagged() {
    let dir = TempDir::new().unwrap();
    // a zero-subdivision budget with an unreachable tolerance cannot converge
    let cfg = serde_json::json!({
        "quad": {"abs_tol": 1e-300, "rel_tol": 1e-300, "max_subdivisions": 0},
    });
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = run(&[
        "--config", cfg_path.to_str().unwrap(),
        "--output-dir", dir.path().to_str().unwrap(),
        "--grid", "1,1,1,1,1",
        "limit-surface",
    ]);
    assert_eq!(out.status.code(), Some(1), "flagged rows give a nonzero exit");
    let text = read(dir.path(), "limit_cdf.csv");
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row.split(',').nth(3).unwrap(), "-1", "row: {row}");
    let best: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((0.0..=1.0).contains(&best), "best estimate still reported");
}

#[test]
fn env_var_thread_fallback_keeps_bytes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = [
        "--output-dir", d, "--n", "300", "--replicates", "3", "--k", "2", "simulate",
    ];
    let out = run(&args);
    assert!(out.status.success());
    let base = read(dir.path(), "replicates.csv");
    let out = bin()
        .env("TAILCORD_THREADS", "2")
        .args(args)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(base, read(dir.path(), "replicates.csv"));
}

#[test]
fn invalid_inputs_exit_nonzero() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    // k out of range for n
    let out = run(&["--output-dir", d, "--n", "10", "--k", "10", "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    // the asymptotic surface is undefined for the Gaussian family
    let out = run(&[
        "--output-dir", d, "--family", "gaussian-bivariate", "--n", "100",
        "--replicates", "3", "--k", "2", "validate",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Gaussian"), "stderr: {err}");

    // bad gamma
    let out = run(&[
        "--output-dir", d, "--family", "logistic-frechet", "--gamma", "1.5", "simulate",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

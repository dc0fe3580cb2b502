//! End-to-end runs of the `qbm` binary against the bundled configs.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qbm"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn csv_column(path: &Path, col: &str) -> Vec<(f64, f64)> {
    let text = read(path);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == col).unwrap();
    lines
        .map(|l| {
            let cells: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            (cells[0], cells[idx])
        })
        .collect()
}

#[test]
fn spread_reproduces_the_canonical_variance() {
    let out = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["spread", "--config"])
        .arg(configs().join("ohmic_hot_spread.json"))
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap();
    assert!(status.success());
    let rows = csv_column(&out.path().join("spread.csv"), "variance");
    let (_, var_at_1) = rows
        .iter()
        .find(|(t, _)| (t - 1.0).abs() < 1e-12)
        .expect("t = 1 row");
    assert!(
        (var_at_1 - 0.571412).abs() < 1e-6,
        "variance at t=1: {var_at_1}"
    );
    // manifest lists every output file
    let manifest = read(&out.path().join("manifest.json"));
    assert!(manifest.contains("spread.csv"));
    assert!(manifest.contains("spread_summary.json"));
}

#[test]
fn runs_are_byte_identical() {
    let out1 = tempfile::tempdir().unwrap();
    let out2 = tempfile::tempdir().unwrap();
    for out in [&out1, &out2] {
        let status = bin()
            .args(["fluctuations", "--config"])
            .arg(configs().join("fluctuations_zero_t.json"))
            .arg("--out")
            .arg(out.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = read(&out1.path().join("fluctuations.csv"));
    let b = read(&out2.path().join("fluctuations.csv"));
    assert_eq!(a, b);
}

#[test]
fn compare_identical_runs_reports_zero_diffs() {
    let out1 = tempfile::tempdir().unwrap();
    let out2 = tempfile::tempdir().unwrap();
    for out in [&out1, &out2] {
        assert!(bin()
            .args(["spread", "--config"])
            .arg(configs().join("ohmic_hot_spread.json"))
            .arg("--out")
            .arg(out.path())
            .status()
            .unwrap()
            .success());
    }
    let cmp = tempfile::tempdir().unwrap();
    let status = bin()
        .arg("compare")
        .arg("--run-a")
        .arg(out1.path())
        .arg("--run-b")
        .arg(out2.path())
        .arg("--out")
        .arg(cmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&read(&cmp.path().join("compare.json"))).unwrap();
    for file in report["files"].as_array().unwrap() {
        for col in file["columns"].as_array().unwrap() {
            assert_eq!(col["max_abs"].as_f64().unwrap(), 0.0);
        }
    }
}

#[test]
fn compare_rejects_grid_mismatch() {
    let out1 = tempfile::tempdir().unwrap();
    let out2 = tempfile::tempdir().unwrap();
    assert!(bin()
        .args(["spread", "--config"])
        .arg(configs().join("ohmic_hot_spread.json"))
        .arg("--out")
        .arg(out1.path())
        .status()
        .unwrap()
        .success());
    // different grid
    let alt = out2.path().join("alt.json");
    let doc = read(&configs().join("ohmic_hot_spread.json")).replace("101", "51");
    std::fs::write(&alt, doc).unwrap();
    assert!(bin()
        .args(["spread", "--config"])
        .arg(&alt)
        .arg("--out")
        .arg(out2.path())
        .status()
        .unwrap()
        .success());
    let cmp = tempfile::tempdir().unwrap();
    let output = bin()
        .arg("compare")
        .arg("--run-a")
        .arg(out1.path())
        .arg("--run-b")
        .arg(out2.path())
        .arg("--out")
        .arg(cmp.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("grid mismatch"), "{err}");
}

#[test]
fn missing_friction_key_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{
            "name": "bad",
            "physical": {
                "mass": 1.0, "spring_constant": 0.0, "bath_kind": "ohmic",
                "temperature": 1.0, "regime": "high"
            },
            "state": { "kind": "gaussian", "center": 0.0, "width": 1.0 },
            "grid": { "t_start": 0.0, "t_end": 1.0, "n_points": 5, "spacing": "linear" }
        }"#,
    )
    .unwrap();
    let output = bin()
        .args(["spread", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("friction"), "{err}");
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let doc = read(&configs().join("ohmic_hot_spread.json")).replace(
        "\"temperature\": 1.0,",
        "\"temperature\": 1.0, \"colour\": 3,",
    );
    std::fs::write(&bad, doc).unwrap();
    let output = bin()
        .args(["spread", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("colour"));
}

#[test]
fn zero_point_divergence_without_cutoff_names_the_regularization() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("nocutoff.json");
    let doc = read(&configs().join("fluctuations_zero_t.json")).replace("\"cutoff\": 10000.0,", "");
    std::fs::write(&bad, doc).unwrap();
    let output = bin()
        .args(["fluctuations", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(
        err.contains("log(cutoff)") && err.contains("zero-point"),
        "{err}"
    );
}

#[test]
fn thermal_cat_fit_reaches_the_quadratic_law() {
    let out = tempfile::tempdir().unwrap();
    assert!(bin()
        .args(["cat", "--config"])
        .arg(configs().join("cat_thermal.json"))
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap()
        .success());
    let summary: serde_json::Value =
        serde_json::from_str(&read(&out.path().join("cat_summary.json"))).unwrap();
    let tau = summary["tau_d"].as_f64().unwrap();
    assert!((tau / 8.0f64.sqrt() - 1.0).abs() < 2e-2, "tau_d = {tau}");
    // density slices requested by the config
    assert!(out.path().join("cat_density_0.csv").exists());
    assert!(out.path().join("cat_density_1.csv").exists());
}

#[test]
fn config_path_from_environment() {
    let out = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["spread", "--out"])
        .arg(out.path())
        .env("QBM_CONFIG", configs().join("ohmic_hot_spread.json"))
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn validate_moments_suite_passes() {
    let out = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["validate", "--suite", "moments", "--config"])
        .arg(configs().join("srt_hot_canonical.json"))
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&read(&out.path().join("validate_moments.json"))).unwrap();
    assert!(report["passed"].as_bool().unwrap());
}

#[test]
fn failing_validation_suite_exits_two() {
    // a deliberately coarse bath discretization fails the reconstruction
    // metrics without erroring
    let dir = tempfile::tempdir().unwrap();
    let coarse = dir.path().join("coarse.json");
    let doc = read(&configs().join("srt_hot_canonical.json"))
        .replace("\"mc_modes\": 400", "\"mc_modes\": 100")
        .replace("\"mc_cutoff\": 300.0", "\"mc_cutoff\": 3000.0");
    std::fs::write(&coarse, doc).unwrap();
    let output = bin()
        .args(["validate", "--suite", "bath", "--config"])
        .arg(&coarse)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "{:?}", output);
    let report: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("out").join("validate_bath.json"))).unwrap();
    assert!(!report["passed"].as_bool().unwrap());
}

//! End-to-end tests of the command-line surface: spec parsing, report
//! fields, determinism, sweep schema, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lab-cli"))
}

fn write_spec(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("lab-cli-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn constants_matches_two_valued_closed_form() {
    let spec = write_spec(
        "w3.json",
        r#"{"depth": 8, "weight": {"family": "two_valued", "t": 3.0, "e": "left_half"}}"#,
    );
    let output = bin()
        .args(["constants", "--spec", spec.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert!((report["ap"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert!((report["rhi_exponent"].as_f64().unwrap() - (1.0 + 1.0 / 5120.0)).abs() < 1e-12);
}

#[test]
fn constants_on_unit_weight_is_all_ones() {
    let spec = write_spec(
        "ones.json",
        r#"{"depth": 4, "weight": {"family": "raw", "values": [1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1]}}"#,
    );
    let output = bin()
        .args(["constants", "--spec", spec.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    for field in ["ap", "ainfty_hruscev", "ainfty_wilson", "b_p_pair"] {
        assert!(
            (report[field].as_f64().unwrap() - 1.0).abs() < 1e-12,
            "{field} should be 1"
        );
    }
    assert!((report["rhi_exponent"].as_f64().unwrap() - (1.0 + 1.0 / 4096.0)).abs() < 1e-14);
}

#[test]
fn constants_rejects_malformed_spec() {
    let spec = write_spec(
        "bad.json",
        r#"{"depth": 4, "weight": {"family": "two_valued", "t": -3.0, "e": "left_half"}}"#,
    );
    let output = bin()
        .args(["constants", "--spec", spec.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("positive"), "diagnostic missing: {err}");
}

#[test]
fn verify_fast_suite_exits_zero() {
    let output = bin()
        .args(["verify", "--depth", "6", "--trials", "6", "--budget", "10"])
        .output()
        .unwrap();
    let text = stdout(&output);
    assert!(output.status.success(), "verify failed:\n{text}");
    assert!(text.contains("rhi"));
    assert!(text.contains("0 failed"));
}

#[test]
fn verify_theorem_filter_and_json_format() {
    let output = bin()
        .args([
            "verify",
            "--depth",
            "6",
            "--trials",
            "4",
            "--theorems",
            "rhi,packing",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&output)).unwrap();
    let names: Vec<&str> = rows
        .iter()
        .map(|r| r["theorem"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"rhi"));
    assert!(names.contains(&"principal-packing"));
    assert!(rows.iter().all(|r| r["passed"].as_bool().unwrap()));
}

#[test]
fn negative_control_fires_at_tau_one() {
    let output = bin()
        .args([
            "verify",
            "--depth",
            "12",
            "--trials",
            "6",
            "--theorems",
            "rhi",
            "--negative-control",
            "--inject-tau",
            "1.0",
        ])
        .output()
        .unwrap();
    let text = stdout(&output);
    assert!(output.status.success(), "control run failed:\n{text}");
    assert!(text.contains("rhi-negative-control"));
    assert!(text.contains("violations"));
}

#[test]
fn negative_control_reports_honestly_inside_sharp_region() {
    // tau = 2 sits inside the finite model's sharp region: the control
    // cannot find a violation there and the exit code says so
    let output = bin()
        .args([
            "verify",
            "--depth",
            "10",
            "--trials",
            "4",
            "--theorems",
            "rhi",
            "--negative-control",
            "--inject-tau",
            "2.0",
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let text = stdout(&output);
    assert!(
        text.contains("FAIL"),
        "expected an honest failure line:\n{text}"
    );
}

#[test]
fn sweep_golden_column_and_determinism() {
    let args = [
        "sweep",
        "--family",
        "two-valued",
        "--t",
        "4,16,256",
        "--depth",
        "8",
        "--format",
        "csv",
    ];
    let first = bin().args(args).output().unwrap();
    assert!(first.status.success());
    let text = stdout(&first);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("schema,family,param,depth,p,ap,ainfty_hruscev"));
    let ap_col = header.split(',').position(|c| c == "ap").unwrap();
    let hru_col = header
        .split(',')
        .position(|c| c == "ainfty_hruscev")
        .unwrap();
    for (line, t) in lines.zip([4.0f64, 16.0, 256.0]) {
        let cells: Vec<&str> = line.split(',').collect();
        let ap: f64 = cells[ap_col].parse().unwrap();
        let hruscev: f64 = cells[hru_col].parse().unwrap();
        assert!(((t + 1.0).powi(2) / (4.0 * t) - ap).abs() < 1e-9 * ap);
        let golden = (t + 1.0) / (2.0 * t.sqrt());
        assert!((hruscev - golden).abs() < 1e-9 * golden, "t={t}");
    }

    // byte-identical re-run
    let second = bin().args(args).output().unwrap();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn sweep_shift_norm_ratio_decreases_in_t() {
    let output = bin()
        .args([
            "sweep",
            "--family",
            "two-valued",
            "--t",
            "16,256,4096,65536",
            "--depth",
            "8",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = stdout(&output);
    let header = text.lines().next().unwrap();
    let col = header
        .split(',')
        .position(|c| c == "shift_norm_over_ap")
        .unwrap();
    let ratios: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect();
    for pair in ratios.windows(2) {
        assert!(pair[1] < pair[0], "ratio must decrease: {ratios:?}");
    }
}

#[test]
fn sweep_power_family_tracks_reciprocal_gap() {
    let output = bin()
        .args([
            "sweep",
            "--family",
            "power",
            "--alpha",
            "-0.5,-0.75,-0.875",
            "--depth",
            "8",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = stdout(&output);
    let header = text.lines().next().unwrap();
    let param_col = header.split(',').position(|c| c == "param").unwrap();
    let ap_col = header.split(',').position(|c| c == "ap").unwrap();
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let alpha: f64 = cells[param_col].parse().unwrap();
        let ap: f64 = cells[ap_col].parse().unwrap();
        let model = 1.0 / (1.0 + alpha);
        let ratio = ap / model;
        assert!((0.25..=4.0).contains(&ratio), "alpha={alpha}: ap={ap}");
    }
}

#[test]
fn shift_norm_reports_exact_and_lower_bound() {
    let wspec = write_spec(
        "w64.json",
        r#"{"depth": 8, "weight": {"family": "two_valued", "t": 64.0, "e": "left_half"}}"#,
    );
    let sspec = write_spec("peter.json", r#"{"kind": "petermichl"}"#);
    let output = bin()
        .args([
            "shift-norm",
            "--spec",
            sspec.to_str().unwrap(),
            "--weight-spec",
            wspec.to_str().unwrap(),
            "--budget",
            "50",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    let exact = report["exact_l2_norm"].as_f64().unwrap();
    let lower = report["lp_lower_bound"].as_f64().unwrap();
    assert!(exact > 0.0 && lower <= exact * (1.0 + 1e-9));
    assert_eq!(report["complexity"].as_u64().unwrap(), 1);
}

//! The binary: exit codes, config precedence, CSV output and golden comparison.

use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-orbits"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("dirac-orbits-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn verify_dirac_passes_for_a1() {
    let out = bin().args(["verify-dirac", "--group", "a1", "--lambda", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "dirac-orbits.report/1");
    assert_eq!(v["pass"], true);
    assert_eq!(v["report"]["scalar_square"]["tol"], 1e-10);
}

#[test]
fn negative_label_is_a_usage_error() {
    let out = bin().args(["verify-dirac", "--group", "a1", "--lambda", "-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dominant"));
}

#[test]
fn a2_reports_true_total_dimension() {
    let out = bin().args(["verify-dirac", "--group", "a2", "--lambda", "1,1", "--samples", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["total_dim"], 128);
}

#[test]
fn narrow_rossman_width_is_refused() {
    let out = bin().args(["rossman", "--widths", "0.05"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
}

#[test]
fn unknown_subcommand_and_key_are_usage_errors() {
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(2));
    let out = bin().args(["rootsys-info", "--set", "bogus=1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config_file_and_csv_is_written() {
    let cfg = tmp("run.cfg");
    let csv = tmp("mults.csv");
    fs::write(&cfg, "# test config\ngroup = a2\nlambda = 2,0\n").unwrap();
    let out = bin()
        .args(["irrep-build", "--config", cfg.to_str().unwrap(), "--lambda", "1,1", "--csv", csv.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["group"], "A2");
    assert_eq!(v["report"]["weyl_dim"], 8);
    let table = fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("weight,multiplicity"));
    assert_eq!(table.lines().count(), 1 + 7);
}

#[test]
fn golden_comparison() {
    let golden = tmp("golden.json");
    let report = tmp("report.json");
    let args = ["rootsys-info", "--group", "b2", "--lambda", "1,1"];
    let out = bin().args(args).args(["--out", golden.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let same = bin().args(args).args(["--out", report.to_str().unwrap(), "--golden", golden.to_str().unwrap()]).output().unwrap();
    assert_eq!(same.status.code(), Some(0));
    fs::write(&golden, "{}\n").unwrap();
    let differ = bin().args(args).args(["--out", report.to_str().unwrap(), "--golden", golden.to_str().unwrap()]).output().unwrap();
    assert_eq!(differ.status.code(), Some(1));
}

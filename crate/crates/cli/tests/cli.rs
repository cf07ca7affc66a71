//! End-to-end checks of the command-line interface: documented outputs,
//! exit codes, file round trips, and byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gerbe-gw"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

#[test]
fn psi_prints_rational() {
    let out = run(&["psi", "--g", "1", "--a", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1/24\n");
    let out = run(&["psi", "--g", "0", "--a", "0,0,0"]);
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn omega_s3_identity_genus_one() {
    let out = run(&["omega", "--group", "builtin:S3", "--genus", "1", "--classes", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "3\n");
    // With the oracle cross-check on.
    let out = run(&[
        "omega",
        "--group",
        "builtin:S3",
        "--genus",
        "1",
        "--classes",
        "0",
        "--check-brute-force",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "3\n");
}

#[test]
fn decompose_q8_exits_clean() {
    let out = run(&[
        "decompose",
        "--group",
        "builtin:Q8",
        "--max-genus",
        "1",
        "--max-points",
        "3",
        "--failures-only",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert!(last.contains("\"failures\":0"), "summary: {last}");
    assert!(last.contains("\"totalRows\":1455"), "summary: {last}");
}

#[test]
fn invalid_input_exit_codes() {
    // Unknown builtin → 2.
    let out = run(&["group", "--group", "builtin:F4"]);
    assert_eq!(out.status.code(), Some(2));
    // Unstable psi spec → 2.
    let out = run(&["psi", "--g", "0", "--a", "0"]);
    assert_eq!(out.status.code(), Some(2));
    // Enumeration cap → 3.
    let out = run(&[
        "omega",
        "--group",
        "builtin:Q8",
        "--genus",
        "2",
        "--classes",
        "0",
        "--check-brute-force",
        "--enum-cap",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn deterministic_reports() {
    let args = ["chartable", "--group", "builtin:Q8"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "byte-identical reports");
    // No floating-point tokens in any numeric output.
    let text = stdout(&a);
    assert!(!text.contains("e-") && !text.contains("0."), "float-like token in {text}");
}

#[test]
fn group_json_round_trip() {
    let dir = std::env::temp_dir();
    let path: PathBuf = dir.join("gerbe_gw_cli_test_group.json");
    let out = run(&["group", "--group", "builtin:S3"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(value["order"], 6);
    assert_eq!(value["centerSize"], 1);
    // Feed the embedded canonical spec back through a file.
    std::fs::write(&path, serde_json::to_string(&value["group"]).unwrap()).unwrap();
    let again = run(&["group", "--group", path.to_str().unwrap()]);
    assert!(again.status.success());
    let value2: serde_json::Value = serde_json::from_str(stdout(&again).trim()).unwrap();
    assert_eq!(value["order"], value2["order"]);
    assert_eq!(value["classSizes"], value2["classSizes"]);
    std::fs::remove_file(&path).ok();
}

#[test]
fn cocycle_pipeline() {
    let dir = std::env::temp_dir();
    let path: PathBuf = dir.join("gerbe_gw_cli_test_cocycle.json");
    // Extracted Q8 cocycle is not a coboundary.
    let out = run(&["cocycle", "extract", "--group", "builtin:Q8"]);
    assert!(out.status.success());
    std::fs::write(&path, stdout(&out)).unwrap();
    let check = run(&["cocycle", "coboundary", "--cocycle", path.to_str().unwrap()]);
    assert!(check.status.success());
    assert!(stdout(&check).contains("\"isCoboundary\":false"));
    let validate = run(&["cocycle", "validate", "--cocycle", path.to_str().unwrap()]);
    assert!(validate.status.success());
    assert!(stdout(&validate).contains("\"isCocycle\":true"));
    // Pushed cocycle powers a twisted GW invariant.
    let pushed = run(&["cocycle", "push", "--group", "builtin:Q8", "--lambda", "1"]);
    assert!(pushed.status.success());
    std::fs::write(&path, stdout(&pushed)).unwrap();
    let gw = run(&[
        "gw",
        "--cocycle",
        path.to_str().unwrap(),
        "--genus",
        "0",
        "--classes",
        "0,0,0",
        "--a",
        "0,0,0",
    ]);
    assert!(gw.status.success());
    assert_eq!(stdout(&gw), "1/4\n");
    std::fs::remove_file(&path).ok();
}

#[test]
fn chartable_verify_mode() {
    let dir = std::env::temp_dir();
    let path: PathBuf = dir.join("gerbe_gw_cli_test_table.json");
    let out = run(&["chartable", "--group", "builtin:S3", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let ok = run(&["chartable", "--group", "builtin:S3", "--verify", path.to_str().unwrap()]);
    assert!(ok.status.success());
    // A corrupted value of the right shape fails verification (exit 1).
    let text = std::fs::read_to_string(&path).unwrap();
    let corrupted = text.replacen("\"-1\"", "\"7\"", 1);
    assert_ne!(corrupted, text);
    std::fs::write(&path, corrupted).unwrap();
    let bad = run(&["chartable", "--group", "builtin:S3", "--verify", path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    std::fs::remove_file(&path).ok();
}

#[test]
fn degree_abelian() {
    // C4, two fully mixed selections at genus 0, no twist:
    // (1/|G|)^{1} · #{(a,b): ab = 1} = 4/4 = 1.
    let out = run(&[
        "degree",
        "--group",
        "builtin:C4",
        "--genus",
        "0",
        "--selections",
        "0,1,2,3;0,1,2,3",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn product_check_small() {
    let out = run(&[
        "product-check",
        "--group1",
        "builtin:C2",
        "--group2",
        "builtin:C2",
        "--max-genus",
        "1",
        "--max-points",
        "2",
        "--failures-only",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().last().unwrap().contains("\"failures\":0"));
}

#[test]
fn selftest_single_criterion() {
    let out = run(&["selftest", "--criterion", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"criterion\":2"));
    assert!(text.contains("\"passed\":true"));
    assert!(text.lines().last().unwrap().contains("\"failures\":0"));
}

#[test]
fn output_to_file() {
    let dir = std::env::temp_dir();
    let path: PathBuf = dir.join("gerbe_gw_cli_test_out.txt");
    let out = run(&["psi", "--g", "2", "--a", "4", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "1/1152\n");
    std::fs::remove_file(&path).ok();
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use holoq::QuantitiesReport;

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify")).args(args).env_remove("HOLOQ_THREADS").output().expect("spawn verify")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("holoq-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn load(dir: &Path) -> QuantitiesReport {
    QuantitiesReport::from_json(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn sphere_run_writes_both_formats() {
    let dir = scratch("sphere");
    let o = verify(&["sphere", "--n", "3..6", "--Nmax", "3", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = load(&dir);
    assert!(r.all_passed() && !r.checks.is_empty());
    assert_eq!(r.metadata["suites"], "sphere");
    let md = std::fs::read_to_string(dir.join("report.md")).unwrap();
    assert!(md.contains("| id | relation |"));
    assert_eq!(md.matches("| sphere.").count() + md.matches("| holo.").count() + md.matches("| spot.").count(), r.checks.len());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("sphere: ") && stdout.contains("0 failed"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn same_config_gives_identical_reports() {
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    for dir in [&a, &b] {
        let o = verify(&["hypergeom", "--instances", "20", "--connection-instances", "5", "--seed", "3", "--format", "json", "--out", dir.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    let (mut ra, mut rb) = (load(&a), load(&b));
    ra.timing = Default::default();
    rb.timing = Default::default();
    assert_eq!(ra.to_json(), rb.to_json());
    assert!(!a.join("report.md").exists());
    assert_eq!(ra.metadata["hypergeom.seed"], "3");
    for d in [a, b] {
        std::fs::remove_dir_all(d).unwrap();
    }
}

#[test]
fn failing_check_exits_one_and_still_writes() {
    // The sign of the Q-polynomial derivative at 0 is the one known failure.
    let dir = scratch("critical");
    let o = verify(&["critical-n4", "--grid", "32", "--preset", "trig1", "--out", dir.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let r = load(&dir);
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
    assert_eq!(failed, ["critical.qres_derivative"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL critical.qres_derivative"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn numeric_run_with_custom_samples() {
    let o = verify(&["numeric", "--n", "4", "--grid", "32", "--coarse-grid", "none", "--preset", "trig1", "--lambda", "0,-2,7/2,5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    // λ = 0 is a pole at n = 4, leaving too few samples to interpolate.
    let o = verify(&["numeric", "--n", "4", "--grid", "32", "--preset", "trig1", "--lambda", "0,-2,7/2"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("pole-free"));
    let o = verify(&["conformal", "--grid", "32", "--preset", "trig2", "--seed", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["numeric", "--preset", "wobbly"][..],
        &["sphere", "--n", "7..3"],
        &["sphere", "--frobnicate"],
        &["numeric", "--lambda", "1/0x"],
        &["numeric", "--grid", "64", "--coarse-grid", "64"],
        &["numeric", "--tol", "speed=1"],
        &["run", "--config", "/nonexistent/holoq.json"],
        &[],
    ] {
        assert_eq!(code(&verify(args)), 2, "{args:?}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(["sphere", "--n", "4", "--Nmax", "1"])
        .env("HOLOQ_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn config_file_round_trips_and_flags_override() {
    let dir = scratch("config");
    std::fs::create_dir_all(&dir).unwrap();
    let o = verify(&["numeric", "--n", "4..6", "--lambda", "1/3,-5/2", "--tol", "adjoint=1e-9", "--dump-config"]);
    assert_eq!(code(&o), 0);
    let dumped = String::from_utf8(o.stdout).unwrap();
    let path = dir.join("run.json");
    std::fs::write(&path, &dumped).unwrap();
    let again = verify(&["run", "--config", path.to_str().unwrap(), "--dump-config"]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), dumped);
    assert!(dumped.contains("\"-5/2\"") && dumped.contains("\"4..6\""));
    // Flags win over the file.
    let over = verify(&["run", "--config", path.to_str().unwrap(), "--grid", "48", "--dump-config"]);
    let text = String::from_utf8(over.stdout).unwrap();
    assert!(text.contains("\"grid\": 48") && text.contains("\"-5/2\""));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn thread_cap_is_honoured() {
    let o = Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(["sphere", "--n", "4..5", "--Nmax", "2"])
        .env("HOLOQ_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

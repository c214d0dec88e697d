use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn open_moyal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_open-moyal")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, format!("{body}\nout_dir = {}\n", dir.join("out").display())).unwrap();
    path.display().to_string()
}

#[test]
fn passing_run_exits_zero_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scenario = star_algebra\nhbar = 1\nseed = 3");
    let out = open_moyal(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/star_algebra.csv").exists());
    assert!(dir.path().join("out/star_algebra.report.txt").exists());
}

#[test]
fn unknown_key_exits_two_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scenario = canonical\nfriction = 1");
    let out = open_moyal(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("friction"));
}

#[test]
fn missing_file_exits_two() {
    let out = open_moyal(&["run", "/nonexistent/run.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn recurrence_violation_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scenario = canonical\nt_max = 100");
    let out = open_moyal(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("recurrence"));
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // Zero temperature with a slow cutoff: the Markov mean is off by far more than 2%.
    let cfg = write_config(
        dir.path(),
        "scenario = canonical\nkBT = 0\nGamma = 2\nN = 100\nomega_max = 20\nn_samples = 100\nt_steps = 20",
    );
    let out = open_moyal(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("out/canonical.report.txt")).unwrap();
    assert!(report.contains("pass = false"));
}

#[test]
fn seed_override_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scenario = star_algebra\nhbar = 1");
    let read = |seed: &str| {
        let out_dir = dir.path().join(seed);
        let out = open_moyal(&["run", &cfg, "--seed", seed, "--out", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        fs::read(out_dir.join("star_algebra.csv")).unwrap()
    };
    assert_ne!(read("1"), read("2"));
}

#[test]
fn selftest_passes() {
    let out = open_moyal(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS k_action"));
}

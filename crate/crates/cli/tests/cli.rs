//! End-to-end CLI checks: exit codes, CSV outputs, preset listing.

use std::path::Path;
use std::process::Command;

fn pcrlb() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pcrlb"))
}

#[test]
fn presets_lists_every_name() {
    let out = pcrlb().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "linear-sanity",
        "example2-gaussian",
        "example2-rayleigh",
        "ballistic-case1",
        "ballistic-case4",
    ] {
        assert!(text.contains(name), "missing preset {name}");
    }
}

#[test]
fn unknown_preset_is_a_config_error() {
    let out = pcrlb().args(["preset", "no-such-thing"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "model = \"ballistic\"\ncase = \"9\"\nn_particles = 10\nm_sequences = 1\n\
         horizon_steps = 5\nseed = 0\n",
    )
    .unwrap();
    let out = pcrlb().args(["run", "--config", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("case"), "stderr should name the field: {err}");

    let out = pcrlb().args(["run", "--config", "/definitely/not/here.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_reports_sequence_and_step() {
    // a tiny rayleigh run with no retry headroom diverges; the run must
    // exit 3 and name the failing (sequence, step) on stderr
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diverge.toml");
    std::fs::write(
        &path,
        "model = \"ungm-rayleigh\"\nn_particles = 2\nm_sequences = 4\n\
         horizon_steps = 20\nseed = 12\nemit_theory = false\n",
    )
    .unwrap();
    let out = pcrlb().args(["run", "--config", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("sequence") && err.contains("step"), "{err}");
}

fn run_config(dir: &Path, body: &str) -> std::process::Output {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    pcrlb().args(["run", "--config", path.to_str().unwrap()]).output().unwrap()
}

#[test]
fn config_run_writes_csv_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let body = format!(
        "model = \"linear-gaussian\"\nn_particles = 30\nm_sequences = 2\n\
         horizon_steps = 6\nseed = 3\nemit_theory = true\nout_dir = \"{}\"\n",
        out_dir.display()
    );
    let out = run_config(dir.path(), &body);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let bound = std::fs::read_to_string(out_dir.join("bound.csv")).unwrap();
    let mut lines = bound.lines();
    assert_eq!(lines.next().unwrap(), "t,state_index,sqrt_pcrlb_approx,sqrt_pcrlb_theory");
    assert_eq!(bound.lines().count(), 1 + 6);
    assert!(!bound.contains('\r'));

    let lambda = std::fs::read_to_string(out_dir.join("lambda.csv")).unwrap();
    assert_eq!(lambda.lines().next().unwrap(), "state_index,lambda_jj");

    let echo = std::fs::read_to_string(out_dir.join("config.toml")).unwrap();
    assert!(echo.contains("linear-gaussian"));
}

#[test]
fn ballistic_run_emits_four_rows_per_step() {
    // 60 steps x 4 states = 240 data rows
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let body = format!(
        "model = \"ballistic\"\ncase = \"1\"\nn_particles = 25\nm_sequences = 2\n\
         horizon_steps = 60\nseed = 3\nemit_theory = false\nout_dir = \"{}\"\n",
        out_dir.display()
    );
    let out = run_config(dir.path(), &body);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let bound = std::fs::read_to_string(out_dir.join("bound.csv")).unwrap();
    assert_eq!(bound.lines().count(), 1 + 240);
    // theory column left empty when the reference bound is disabled
    assert!(bound.lines().nth(1).unwrap().ends_with(','));
}

#[test]
fn preset_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = pcrlb()
        .args([
            "preset",
            "linear-sanity",
            "--n",
            "10",
            "--m",
            "2",
            "--t",
            "4",
            "--seed",
            "9",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bound = std::fs::read_to_string(out_dir.join("bound.csv")).unwrap();
    assert_eq!(bound.lines().count(), 1 + 4);
    let echo = std::fs::read_to_string(out_dir.join("config.toml")).unwrap();
    assert!(echo.contains("seed = 9"));
}

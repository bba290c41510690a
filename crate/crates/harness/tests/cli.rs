//! CLI contract tests: exit codes, config loading and overrides, and the
//! on-disk artifact shapes.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cltlab"))
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn defaults_run_clean() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = bin()
        .args(["check-lemmas", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count() >= 8);
    assert!(out.join("check_lemmas.csv").exists());
}

#[test]
fn missing_config_is_exit_2() {
    let status = bin()
        .args(["rate", "--config", "/nonexistent/config.json"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn scenario_mismatch_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "spec_version": 1,
            "scenario": "certify",
            "law": "rademacher",
            "theta": "theta0",
            "ns": [8]
        }"#,
    );
    let status = bin().args(["rate", "--config", &cfg]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn invalid_theta0_dimension_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "spec_version": 1,
            "scenario": "certify",
            "law": "rademacher",
            "theta": "theta0",
            "ns": [8, 9]
        }"#,
    );
    let output = bin().args(["certify", "--config", &cfg]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("divisible by 4"), "stderr: {stderr}");
}

#[test]
fn unknown_spec_version_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "spec_version": 2,
            "scenario": "rate",
            "law": "rademacher",
            "theta": "uniform",
            "ns": [8, 12, 16]
        }"#,
    );
    let status = bin().args(["rate", "--config", &cfg]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn signal_to_noise_guard_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // tiny atom budget forces Monte Carlo; the minimal sample count makes
    // the confidence radius dominate the small distances
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "spec_version": 1,
            "scenario": "rate",
            "law": "rademacher",
            "theta": "uniform",
            "ns": [26, 28, 30],
            "budget": 4,
            "mc_samples": 1000
        }"#,
    );
    let out = dir.path().join("out");
    let output = bin()
        .args(["rate", "--config", &cfg, "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("mc_samples"), "stderr: {stderr}");
}

#[test]
fn failed_expectation_is_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "spec_version": 1,
            "scenario": "certify",
            "law": "rademacher",
            "theta": "uniform",
            "ns": [16],
            "expect_outcome": "certified"
        }"#,
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["certify", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    // evidence still written
    assert!(out.join("certify.csv").exists());
}

#[test]
fn uniform_refutation_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "spec_version": 1,
            "scenario": "certify",
            "law": "rademacher",
            "theta": "uniform",
            "ns": [16],
            "expect_outcome": "refuted"
        }"#,
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["certify", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let cert = std::fs::read_to_string(out.join("certificate_n16.json")).unwrap();
    assert!(cert.contains("\"outcome\": \"refuted\""));
    assert!(cert.contains("\"counterexample_xi\": 4.0"));
}

#[test]
fn seed_override_changes_digest() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, out: &Path| {
        let status = bin()
            .args([
                "sphere-tails",
                "--seed",
                seed,
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read_to_string(out.join("sphere_tails_n32.csv")).unwrap()
    };
    let a = run("1", &dir.path().join("a"));
    let b = run("2", &dir.path().join("b"));
    let digest_line = |s: &str| {
        s.lines()
            .find(|l| l.starts_with("# config_digest"))
            .unwrap()
            .to_string()
    };
    assert_ne!(digest_line(&a), digest_line(&b));
    assert!(a.contains("# seed=1"));
    assert!(b.contains("# seed=2"));
}

#[test]
fn csv_layout_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["esseen", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out.join("esseen.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,exact,esseen_bound,esseen_t,classical_be,epsilon,r1,r2_min,r2_reference,\
         central_integral,middle_integral,tail_integral"
    );
    // data rows, then a trailing metadata comment block
    let rest: Vec<&str> = lines.collect();
    let first_meta = rest.iter().position(|l| l.starts_with('#')).unwrap();
    assert!(first_meta > 0);
    assert!(rest[first_meta..].iter().all(|l| l.starts_with('#')));
    assert!(rest.iter().any(|l| l.starts_with("# config_digest=")));
    assert!(rest.iter().any(|l| l.starts_with("# version=")));
    assert!(rest.iter().any(|l| l.starts_with("# seed=")));
}

#[test]
fn cdf_export() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "spec_version": 1,
            "scenario": "rate",
            "law": "rademacher",
            "theta": "theta0",
            "ns": [8, 12, 16],
            "export_cdf": true
        }"#,
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["rate", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    for n in [8, 12, 16] {
        let text = std::fs::read_to_string(out.join(format!("cdf_n{n}.csv"))).unwrap();
        assert!(text.starts_with("t,F,Phi,gap\n"));
        // last data row has F = 1
        let last_data = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .next_back()
            .unwrap();
        assert_eq!(last_data.split(',').nth(1), Some("1"));
    }
}

#[test]
fn explicit_theta_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "spec_version": 1,
            "scenario": "esseen",
            "law": "rademacher",
            "theta": { "explicit": [0.7071067811865475, 0.7071067811865475] },
            "ns": [2]
        }"#,
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["esseen", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out.join("esseen.csv")).unwrap();
    assert!(text.contains("\n2,0.25,"), "table: {text}");
}

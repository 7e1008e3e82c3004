//! CLI surface: subcommands, exit codes, and file outputs.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wpbc"))
}

#[test]
fn preset_emits_a_loadable_scenario() {
    let out = bin().arg("preset").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let spec = wpbc::harness::scenario::parse_scenario(&text).unwrap();
    assert_eq!(spec.config, wpbc::harness::scenario::paper_default().config);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.toml");
    let out = bin().arg("preset").arg("--out").arg(&path).output().unwrap();
    assert!(out.status.success());
    assert!(path.exists());
}

#[test]
fn sweep_runs_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.toml");
    std::fs::write(
        &scenario,
        r#"
preset = "paper-default"
[sweep]
axis = "m_tx"
values = [4]
[run]
schemes = ["proposed"]
mc_trials = 300
master_seed = 3
[grid]
alpha_points = 4
pce_points = 5
refine = false
"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&scenario)
        .args(["--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "axis,scheme,tag,rate_bits,rate_se,harvest_w,zeta,alpha,p_ce,feasible"
    );
    assert_eq!(lines.count(), 2); // one axis value × one scheme × two tags
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("scheme=proposed"), "{stdout}");
}

#[test]
fn scheme_flag_restricts_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.toml");
    std::fs::write(
        &scenario,
        r#"
preset = "paper-default"
[sweep]
axis = "m_tx"
values = [4]
[run]
schemes = ["proposed", "omni"]
mc_trials = 200
[grid]
alpha_points = 4
pce_points = 5
refine = false
"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&scenario)
        .args(["--scheme", "omni", "--out"])
        .arg(&csv)
        .output()
        .unwrap();
    // omni alone cannot activate the far tag at these powers: infeasible-only
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("omni"));
    assert!(!text.contains("proposed"));
}

#[test]
fn configuration_errors_exit_2() {
    // missing file
    let out = bin()
        .args(["sweep", "--config", "/nonexistent/path.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // malformed scenario
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "preset = \"paper-default\"\nbogus_key = 1\n").unwrap();
    let out = bin().args(["sweep", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    // unknown scheme flag
    let ok = dir.path().join("ok.toml");
    std::fs::write(&ok, "preset = \"paper-default\"\n").unwrap();
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&ok)
        .args(["--scheme", "sideways"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_subcommand_passes() {
    let out = bin()
        .args(["validate", "--trials", "4000", "--seed", "7"])
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        out.status.success(),
        "stdout: {stdout} stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout.matches("PASS").count(), 9, "{stdout}");
    assert!(!stdout.contains("FAIL"));
}

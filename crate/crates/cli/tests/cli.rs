//! End-to-end runs of the `zkl` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zkl-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn zkl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zkl"))
        .args(args)
        .output()
        .expect("zkl runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn malformed_config_exits_with_two() {
    let dir = scratch("malformed");
    let cfg = dir.join("bad.cfg");
    std::fs::write(&cfg, "params.eps = 0.05\nparams.theta_e\n").unwrap();
    let o = zkl(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn zero_eps_exits_with_two() {
    let o = zkl(&["spectrum", "--eps", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_experiment_exits_with_two() {
    let o = zkl(&["run", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = scratch("config");
    let cfg = dir.join("run.cfg");
    let out = dir.join("out");
    std::fs::write(
        &cfg,
        "experiment = spectrum\nparams.theta_e = 0.5\nparams.alpha = 0.2\n",
    )
    .unwrap();
    let o = zkl(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--theta-e",
        "0.35",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(
        manifest.contains("\"params.theta_e\": \"0.35\""),
        "{manifest}"
    );
    assert!(manifest.contains("\"params.alpha\": \"0.2\""), "{manifest}");
    assert!(manifest.contains("\"experiment\": \"spectrum\""));
}

#[test]
fn default_resonances_pass() {
    let out = scratch("res-default");
    let o = zkl(&["resonances", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn low_temperature_resonances_report_the_root_near_sqrt3() {
    let out = scratch("res-low");
    let o = zkl(&[
        "run",
        "resonances",
        "--theta-e",
        "0.05",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(out.join("resonances.csv")).unwrap();
    let root: f64 = csv
        .lines()
        .find(|l| l.starts_with("0-0,"))
        .and_then(|l| l.split(',').nth(4))
        .unwrap()
        .parse()
        .unwrap();
    assert!((root - 3f64.sqrt()).abs() < 0.01, "root {root}");
    // the (0-s) roots leave |xi| <= 1/2 at this temperature, a localization failure
    assert!(stdout(&o).contains("FAIL resonance localization (0-s)"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn converge_exit_code_follows_the_fitted_order() {
    let out = scratch("converge");
    let o = zkl(&[
        "run",
        "converge",
        "--eps-list",
        "0.2,0.1,0.05",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = stdout(&o);
    let order: f64 = text
        .split("fitted order ")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    let expected = if order >= 1.6 { 0 } else { 1 };
    assert_eq!(o.status.code(), Some(expected), "{text}");
    assert!(out.join("converge.csv").exists());
}

#[test]
fn zakharov_dump_feeds_wkb_residual() {
    let dir = scratch("dump");
    let zout = dir.join("z");
    let o = zkl(&["zakharov", "--T", "0.02", "--out", zout.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let state = zout.join("zakharov_state.bin");
    assert!(state.exists());
    let wout = dir.join("w");
    let o = zkl(&[
        "wkb-residual",
        "--input-state",
        state.to_str().unwrap(),
        "--out",
        wout.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let manifest = std::fs::read_to_string(wout.join("manifest.json")).unwrap();
    assert!(manifest.contains("zakharov_state.bin"));
}

#[test]
fn missing_input_state_exits_with_two() {
    let out = scratch("missing");
    let o = zkl(&[
        "wkb-residual",
        "--input-state",
        "/nonexistent/state.bin",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_all_at_high_temperature_keeps_the_gap_and_loses_localization() {
    let o = zkl(&["verify-all", "quick", "--theta-e", "0.9"]);
    let text = stdout(&o);
    assert!(text.contains("PASS hyperbolicity: spectral gap"), "{text}");
    assert!(text.contains("FAIL resonances (0-0)"), "{text}");
    assert_eq!(o.status.code(), Some(1));
}

//! The `osmoflow` binary: argument handling, exit codes and output files.

use std::path::Path;
use std::process::{Command, Output};

fn osmoflow(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osmoflow")).args(args).current_dir(dir).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn help_and_version_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let help = osmoflow(&["--help"], dir.path());
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8_lossy(&help.stdout);
    assert!(text.contains("verify-all") && text.contains("stokes_order = 64"));
    let version = osmoflow(&["--version"], dir.path());
    assert_eq!(version.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&version.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn usage_and_io_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = osmoflow(&["spectrum", "--params", "missing.toml"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing.toml"));
    assert_eq!(osmoflow(&["no-such-command"], dir.path()).status.code(), Some(2));
    assert_eq!(osmoflow(&["stokes", "--k", "2"], dir.path()).status.code(), Some(2));
}

#[test]
fn invalid_configuration_is_rejected_before_computing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("neg.toml"), "[params]\nnu_minus = -1.0\n").unwrap();
    let out = osmoflow(&["--config", "neg.toml", "verify-all", "--out", "report"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nu_minus"));
    assert!(!dir.path().join("report").exists());
    std::fs::write(dir.path().join("typo.toml"), "[grid]\ncels = 64\n").unwrap();
    assert_eq!(osmoflow(&["--config", "typo.toml", "verify-all"], dir.path()).status.code(), Some(2));
}

#[test]
fn equilibrium_stokes_and_ls_print_json() {
    let dir = tempfile::tempdir().unwrap();
    let m_plus = (2.2 * std::f64::consts::PI).to_string();
    let m_minus = (3.0 * std::f64::consts::PI).to_string();
    let eq = osmoflow(&["equilibrium", "--m+", &m_plus, "--m-", &m_minus, "--rc", "2"], dir.path());
    assert_eq!(eq.status.code(), Some(0));
    let roots = json(&eq)["equilibria"].as_array().unwrap().clone();
    assert_eq!(roots.len(), 1);
    assert!((roots[0]["r_star"].as_f64().unwrap() - 1.052119767322).abs() < 1e-9);

    let st = json(&osmoflow(&["stokes", "--k", "2", "--h", "-3"], dir.path()));
    assert!((st["v_interface"][0].as_f64().unwrap() + 27.0 / 128.0).abs() < 1e-10);
    assert_eq!(st["k"], 2);
    assert!(st["config_hash"].as_str().unwrap().len() == 64);

    let ls = json(&osmoflow(&["verify-ls", "--nu+", "1", "--nu-", "3", "--xi", "0.7"], dir.path()));
    assert_eq!(ls["det_m"].as_f64().unwrap(), -32.0);
    assert!(ls["min_singular_value"].as_f64().unwrap() > 0.0);

    let none = osmoflow(&["equilibrium", "--m+", "3e-8", "--m-", "9", "--rc", "2"], dir.path());
    assert_eq!(none.status.code(), Some(1));
}

#[test]
fn spectrum_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let run = osmoflow(&["spectrum", "--kmax", "4", "--cells", "32", "--out", out], dir.path());
        assert_eq!(run.status.code(), Some(0));
    }
    for file in ["spectrum.json", "spectrum.csv"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
    let csv = std::fs::read_to_string(dir.path().join("a/spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# osmoflow"));
    assert_eq!(lines.next(), Some("k,re,im"));
    assert!(!csv.contains('\r'));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a/spectrum.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["kernel_dimension"], 4);
}

#[test]
fn unreachable_zero_tolerance_fails_the_suite() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tight.toml"), "[grid]\ncells = 32\n\n[spectrum]\nk_max = 4\ntol_zero = 1e-30\n")
        .unwrap();
    let out = osmoflow(&["--config", "tight.toml", "verify-all", "--out", "r"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("r/verify_report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["criteria"][0]["passed"], false);
    assert_eq!(report["kernel_dimension"], 0);
}

#[test]
fn simulation_restarts_from_its_final_state() {
    let dir = tempfile::tempdir().unwrap();
    let first = osmoflow(&["simulate", "--tfinal", "0.5", "--dt", "1e-3", "--out", "one"], dir.path());
    assert_eq!(first.status.code(), Some(0));
    let traj = std::fs::read_to_string(dir.path().join("one/trajectory.csv")).unwrap();
    assert_eq!(traj.lines().nth(1), Some("t,R,M+,M-,E,D,distance"));
    let second = osmoflow(
        &["simulate", "--init", "one/final_state.json", "--tfinal", "0.5", "--dt", "1e-3", "--out", "two"],
        dir.path(),
    );
    assert_eq!(second.status.code(), Some(0));
    let last = std::fs::read_to_string(dir.path().join("two/trajectory.csv")).unwrap();
    let t_end: f64 = last.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((t_end - 1.0).abs() < 1e-9);
    let again = osmoflow(&["simulate", "--tfinal", "0.5", "--dt", "1e-3", "--out", "three"], dir.path());
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(
        std::fs::read(dir.path().join("one/final_state.json")).unwrap(),
        std::fs::read(dir.path().join("three/final_state.json")).unwrap()
    );
}

#[test]
fn mode_evolution_writes_norms() {
    let dir = tempfile::tempdir().unwrap();
    let out = osmoflow(&["mode-evolve", "--k", "2", "--out", "m"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("m/mode_norms.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("t,norm,drift"));
    let rep: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("m/mode_evolve.json")).unwrap()).unwrap();
    assert!(rep["relative_error"].as_f64().unwrap() < 0.02);
}

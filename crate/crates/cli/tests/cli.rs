use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use optomag::scenario::{parse_trajectory_csv, ScenarioConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_optomag"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

const SHORT_SWAP: &str = "units = \"kappa\"\nscenario = \"single_node_swap\"\nN_a = 3\nN_b = 3\nt_end = 0.2\nsample_every = 5\nwigner_snapshots = [0.1]\nwigner_points = 11\n";

#[test]
fn simulate_writes_trajectory_summary_echo_and_wigner() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT_SWAP);
    let out = dir.path().join("out");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let text = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("t,"), "{header}");
    let traj = parse_trajectory_csv(&text).unwrap();
    assert_eq!(traj.times[0], 0.0);
    assert!((traj.times.last().unwrap() - 0.2).abs() < 1e-12);
    let first_value = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    let mantissa = first_value.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17, "{first_value}");

    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["scenario"], "single_node_swap");
    let echo: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("params_echo.json")).unwrap()).unwrap();
    assert_eq!(echo["N_a"]["source"], "config");
    assert_eq!(echo["G"]["source"], "default");

    let wigner = fs::read_to_string(out.join("wigner_cavity_0.1.csv")).unwrap();
    let mut lines = wigner.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 12);
    assert_eq!(lines.count(), 11);
    assert!(out.join("wigner_mechanics_0.1.csv").exists());
}

#[test]
fn json_format_replaces_the_csv_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT_SWAP);
    let out = dir.path().join("out");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert!(out.join("trajectory.json").exists());
    assert!(!out.join("trajectory.csv").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT_SWAP);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(code(&run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])), 0);
    }
    for name in ["trajectory.csv", "summary.json", "params_echo.json", "wigner_cavity_0.1.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn sweep_writes_one_directory_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scenario = \"two_node_transfer\"\nN_a = 2\nN_b = 2\nt_end = 0.3\nsample_every = 10\n");
    let out = dir.path().join("out");
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--param", "xi", "--values", "0.5,1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("xi_0.5/trajectory.csv").exists());
    assert!(out.join("xi_1/summary.json").exists());
    let table = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.starts_with("xi,"));
}

#[test]
fn design_reports_formula_and_quoted_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "override_g0_hz = 8.3e3\n");
    let out = dir.path().join("out");
    let o = run(&["design", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("g0_hz"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["device"]["g0_hz"]["diverges"], true);
    assert!(out.join("device.csv").exists());
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    for text in ["scenario = \"single_node_swap\"\nG_typo = 1\n", "G = 1\n", "scenario = \"single_node_swap\"\ndt_factor = 10\n"] {
        let cfg = write_config(dir.path(), text);
        assert_eq!(code(&run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out])), 2, "{text}");
    }
    let cfg = write_config(dir.path(), SHORT_SWAP);
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&run(&["simulate", "--config", "/nonexistent.toml", "--out", out])), 2);
    assert_eq!(code(&run(&["simulate", "--config", cfg, "--out", out, "--format", "xml"])), 2);
    assert_eq!(code(&run(&["sweep", "--config", cfg, "--param", "G", "--values", "1", "--out", out])), 2);
    assert_eq!(code(&run(&["design", "--config", cfg, "--out", out])), 2);
    assert_eq!(code(&run(&["simulate"])), 2);
}

#[test]
fn strict_leakage_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scenario = \"single_node_swap\"\nN_a = 2\nN_b = 2\nt_end = 0.4\nleakage_strict = true\n");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            ScenarioConfig::from_path(&path).unwrap().kind().unwrap();
            n += 1;
        }
    }
    assert!(n >= 5);
}

//! End-to-end command surface: run produces the contracted artifacts,
//! checks consume them, exit codes reflect verdicts, and fixed seeds give
//! bit-identical reruns.

use std::path::{Path, PathBuf};
use std::process::Command;

use nlts_cli::config::RunConfig;
use nlts_cli::{commands, series, snapshot};

fn binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_nlts"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL_RUN: &str = r#"
[grid]
n = 2
N = 64
L = 6.283185307179586

[model]
alpha = 0.5

[time]
t_end = 0.1
dt_max = 0.005

[output]
series_path = "out/series.csv"
snapshot_dir = "out/snaps"
series_interval = 0.02
snapshot_times = [0.0, 0.05]

[initial]
kind = "gaussian"
amplitude = 0.8
sigma = 0.7
center = [3.141592653589793, 3.141592653589793]
"#;

#[test]
fn run_writes_series_snapshots_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write(dir.path(), "run.toml", SMALL_RUN);
    let status = Command::new(binary())
        .args(["run"])
        .arg(&cfg_path)
        .args(["--output-root"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());

    let series_path = dir.path().join("out/series.csv");
    let records = series::read_series(&series_path).unwrap();
    assert!(records.len() >= 5);
    assert_eq!(records[0].t, 0.0);

    let snaps = snapshot::read_snapshot_dir(&dir.path().join("out/snaps")).unwrap();
    assert_eq!(snaps.len(), 2);

    // the echo next to the series parses back to the identical config
    let echo = std::fs::read_to_string(dir.path().join("out/series.echo.toml")).unwrap();
    let original = RunConfig::parse(SMALL_RUN).unwrap();
    assert_eq!(RunConfig::parse(&echo).unwrap(), original);
}

#[test]
fn zero_run_exits_zero_with_zero_series() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_RUN.replace(
        "kind = \"gaussian\"\namplitude = 0.8\nsigma = 0.7\ncenter = [3.141592653589793, 3.141592653589793]",
        "kind = \"zero\"",
    );
    let cfg_path = write(dir.path(), "zero.toml", &text);
    let status = Command::new(binary())
        .args(["run"])
        .arg(&cfg_path)
        .args(["--output-root"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let records = series::read_series(&dir.path().join("out/series.csv")).unwrap();
    for r in &records {
        assert_eq!(r.mass, 0.0);
        assert_eq!(r.max, 0.0);
        assert_eq!(r.grad_inf, 0.0);
    }
}

#[test]
fn fixed_seed_reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let text = String::from("seed = 1234\n")
        + &SMALL_RUN.replace(
            "kind = \"gaussian\"\namplitude = 0.8\nsigma = 0.7\ncenter = [3.141592653589793, 3.141592653589793]",
            "kind = \"random_bandlimited\"\nk_cut = 8\namplitude = 0.5",
        );
    let cfg_path = write(dir.path(), "rng.toml", &text);
    let cfg = RunConfig::load(&cfg_path).unwrap();
    let root_a = dir.path().join("a");
    let root_b = dir.path().join("b");
    commands::run(&cfg, Some(&root_a), true).unwrap();
    commands::run(&cfg, Some(&root_b), true).unwrap();
    let bytes_a = std::fs::read(root_a.join("out/series.csv")).unwrap();
    let bytes_b = std::fs::read(root_b.join("out/series.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn check_subcommand_passes_on_clean_run_and_writes_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write(dir.path(), "run.toml", SMALL_RUN);
    let cfg = RunConfig::load(&cfg_path).unwrap();
    commands::run(&cfg, Some(dir.path()), true).unwrap();

    let series_path = dir.path().join("out/series.csv");
    let output = Command::new(binary())
        .args(["check"])
        .arg(&series_path)
        .args(["--config"])
        .arg(&cfg_path)
        .args(["--name", "mass_dissipation", "--name", "maximum_principle", "--name", "decay_bound"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(output.status.success(), "{stdout}");
    assert!(stdout.contains("mass_dissipation"));
    assert!(stdout.contains("PASS"));

    let jsonl = std::fs::read_to_string(dir.path().join("out/series.verdicts.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 3);
    for line in jsonl.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true, "{line}");
    }
}

#[test]
fn check_exit_code_signals_failure() {
    // a perp run does not satisfy the mass-dissipation identity; the
    // checker must guard and fail with a nonzero exit
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_RUN.replace("alpha = 0.5", "alpha = 0.5\nvelocity_type = \"perp\"");
    let cfg_path = write(dir.path(), "perp.toml", &text);
    let cfg = RunConfig::load(&cfg_path).unwrap();
    commands::run(&cfg, Some(dir.path()), true).unwrap();
    let status = Command::new(binary())
        .args(["check"])
        .arg(dir.path().join("out/series.csv"))
        .args(["--config"])
        .arg(&cfg_path)
        .args(["--name", "mass_dissipation"])
        .status()
        .unwrap();
    assert!(!status.success());

    // the conservation check passes on the same run
    let status = Command::new(binary())
        .args(["check"])
        .arg(dir.path().join("out/series.csv"))
        .args(["--config"])
        .arg(&cfg_path)
        .args(["--name", "mass_conservation"])
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn recurrence_subcommand_witness() {
    let output = Command::new(binary())
        .args(["recurrence", "--C", "2", "--beta", "2", "--W0", "0.25"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("C,beta,W0,converged,k_at_underflow"));
    assert!(stdout.contains("2,2,0.25,true"), "{stdout}");

    let output = Command::new(binary())
        .args(["recurrence", "--C", "2", "--beta", "2", "--W0", "1.5"])
        .output()
        .unwrap();
    assert!(!output.status.success(), "diverging start must exit nonzero");
}

#[test]
fn degiorgi_subcommand_reads_snapshot_dir() {
    let dir = tempfile::tempdir().unwrap();
    // tiny zero-solution snapshot set: every level is vacuously admissible
    let grid = nlts_core::grid::Grid::new(2, 16, 1.0).unwrap();
    let snap_dir = dir.path().join("snaps");
    std::fs::create_dir_all(&snap_dir).unwrap();
    for i in 0..=16 {
        let t = i as f64 / 16.0;
        let field = nlts_core::field::PhysicalField::zeros(grid);
        snapshot::write_snapshot(&snap_dir.join(snapshot::snapshot_file_name(i, t)), &field, t)
            .unwrap();
    }
    let output = Command::new(binary())
        .args(["degiorgi"])
        .arg(&snap_dir)
        .args(["--alpha", "0.5", "--k-max", "3"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(output.status.success(), "{stdout}");
    assert!(stdout.contains("recurrence bound"));
    assert!(snap_dir.join("degiorgi.verdicts.jsonl").exists());
}

#[test]
fn rejected_configs_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SMALL_RUN.replace("alpha = 0.5", "alpha = 1.5");
    let cfg_path = write(dir.path(), "bad.toml", &bad);
    let output = Command::new(binary()).args(["run"]).arg(&cfg_path).output().unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("alpha out of (0,1)"), "{stderr}");
}

use std::path::Path;
use std::process::{Command, Output};

use halftorus_cli::{run_pipeline, RunConfig, Stage};

fn halftorus(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halftorus"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn default_verify_passes_with_two_n_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = halftorus(&["verify", "--nphi", "201"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read(&dir.path().join("report.txt"));
    assert!(report.contains("overall = PASS"));
    assert!(report.contains("count = 6"));
    let csv = read(&dir.path().join("critical_points.csv"));
    let kinds: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(kinds.len(), 6);
    assert_eq!(kinds.iter().filter(|k| **k == "maximum").count(), 3);
    for f in [
        "radial.csv",
        "c2.csv",
        "field.txt",
        "field_gnuplot.dat",
        "theta_profiles.csv",
        "timing.txt",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert!(!dir.path().join("FAILED").exists());
}

#[test]
fn axisymmetric_run_reports_a_circle() {
    let dir = tempfile::tempdir().unwrap();
    let out = halftorus(&["critical", "--eps", "0", "--nphi", "201"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = read(&dir.path().join("report.txt"));
    assert!(report.contains("kind = circle"));
    assert_eq!(read(&dir.path().join("critical_points.csv")).lines().count(), 1);
}

#[test]
fn degenerate_shape_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "R = 1.05\nr = 1\neps = 0.1\n").unwrap();
    let out = halftorus(&["verify", "--config", cfg.to_str().unwrap()], &dir.path().join("run"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("must exceed"));
}

#[test]
fn mode_below_threshold_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = halftorus(&["perturb", "--n", "2", "--nphi", "201"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(dir.path().join("FAILED").exists());
    assert!(dir.path().join("radial.csv").exists());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig {
        nphi: 161,
        ..Default::default()
    };
    cfg.out = a.path().to_path_buf();
    run_pipeline(&cfg, Stage::Verify).unwrap();
    cfg.out = b.path().to_path_buf();
    run_pipeline(&cfg, Stage::Verify).unwrap();
    for f in [
        "report.txt",
        "field.txt",
        "critical_points.csv",
        "c2.csv",
        "config.resolved.txt",
    ] {
        assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{f}");
    }
}

#[test]
fn sweep_writes_rows_and_slope_footer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "eps_list = 0.04, 0.02, 0.01\nnphi = 161\n").unwrap();
    let run = dir.path().join("run");
    let out = halftorus(&["sweep", "--config", cfg.to_str().unwrap()], &run);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&run.join("sweep.csv"));
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with("PASS,")));
    let footer = csv.lines().find(|l| l.starts_with("# stationarity n=3")).unwrap();
    let slope: f64 = footer.rsplit("slope=").next().unwrap().parse().unwrap();
    assert!((slope - 2.0).abs() < 0.1, "{slope}");
    assert!(run.join("runs/n3_eps1e-2/report.txt").exists());
}

#[test]
fn sweep_without_amplitudes_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = halftorus(&["sweep"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn stale_failure_marker_is_cleared() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("FAILED"), "old").unwrap();
    let out = halftorus(&["radial", "--nphi", "101"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(!dir.path().join("FAILED").exists());
}

#[test]
fn mode_list_sweep_gives_one_row_per_mode() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("modes.cfg");
    std::fs::write(
        &cfg,
        "eps_list = 0.05\nn_list = auto, auto+1, auto+2, auto+3\nnphi = 161\n",
    )
    .unwrap();
    let run = dir.path().join("run");
    let out = halftorus(&["sweep", "--config", cfg.to_str().unwrap()], &run);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&run.join("sweep.csv"));
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for (row, n) in rows.iter().zip(3usize..) {
        assert_eq!(row[1], n.to_string());
        assert_eq!(row[8], (2 * n).to_string());
        assert_eq!(row[13], "PASS");
    }
    assert_eq!(csv.lines().filter(|l| l.starts_with("# empirical_eps2")).count(), 4);
}

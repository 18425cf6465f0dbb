use std::path::Path;
use std::process::Command;

use hypext::cli::{csv_outputs, run_with, Command as Cmd, RunConfig};
use hypext::dyadic::{CellSet, Domain, Tile};
use hypext::extension::{io::read_field, SpacetimeGrid};

const SMALL: &str = "4,4,9,16";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypext"))
}

fn write_set(dir: &Path, name: &str, set: &CellSet) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, set.to_json()).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String, String) {
    let o = bin().args(args).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

#[test]
fn decompose_single_tile() {
    let dir = tempfile::tempdir().unwrap();
    let tile = CellSet::from_tile(&Tile::from_indices(1, 0, 2, 1).unwrap(), 3, Domain::Unit).unwrap();
    let set = write_set(dir.path(), "tile.json", &tile);
    let out = dir.path().join("out");
    let (code, _, err) = run(&["decompose", "--set", set.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert_eq!(rows, ["2,1,1,1,0.125"]);
    let cover = hypext::decomposition::TileCover::from_json(&std::fs::read_to_string(out.join("cover_K2.json")).unwrap())
        .unwrap();
    assert_eq!(cover.tile_count(), 1);
}

#[test]
fn decompose_empty_set() {
    let dir = tempfile::tempdir().unwrap();
    let set = write_set(dir.path(), "empty.json", &CellSet::empty(4, Domain::Unit));
    let out = dir.path().join("out");
    let (code, _, err) = run(&["decompose", "--set", set.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1);
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let out = dir.path().join("out");
    let (code, _, err) = run(&["decompose", "--set", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
    assert_eq!(run(&["norm", "--out", out.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["norm", "--grid", "1,2", "--out", out.to_str().unwrap()]).0, 2);
}

#[test]
fn norm_of_empty_set_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let set = write_set(dir.path(), "empty.json", &CellSet::empty(3, Domain::Unit));
    let out = dir.path().join("out");
    let (code, stdout, err) =
        run(&["norm", "--set", set.to_str().unwrap(), "--grid", SMALL, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(stdout.trim(), "0.00000000000e0");
}

#[test]
fn extend_single_cell_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let cell = CellSet::new(3, Domain::Unit, vec![(0, 0)]).unwrap();
    let set = write_set(dir.path(), "cell.json", &cell);
    let out = dir.path().join("out");
    let (code, _, err) =
        run(&["extend", "--set", set.to_str().unwrap(), "--grid", SMALL, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let field = read_field(std::fs::File::open(out.join("field.bin")).unwrap()).unwrap();
    let g = SpacetimeGrid::new(4.0, 4.0, 9, 16).unwrap();
    assert_eq!(field.grid, g);
    let origin = field.get(g.m[0] / 2, g.m[1] / 2, g.m[2] / 2);
    assert!((origin.re - 1.0 / 64.0).abs() < 1e-15 && origin.im.abs() < 1e-15);
}

#[test]
fn aliased_grid_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let set = write_set(dir.path(), "full.json", &CellSet::full(2, Domain::Unit).unwrap());
    let out = dir.path().join("out");
    // spacing far beyond what the cell size resolves
    let (code, _, err) =
        run(&["norm", "--set", set.to_str().unwrap(), "--grid", "4,400,9,16", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 4, "{err}");
}

#[test]
fn critical_scan_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"r": "7/3", "scan": {"rows": [[1,1],[2,2],[3,3]], "cells_log2": 1, "refine": 1}}"#).unwrap();
    let out = dir.path().join("out");
    let (code, stdout, err) =
        run(&["scan-bilinear", "--config", cfg.to_str().unwrap(), "--grid", SMALL, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("expected 0.000000"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report["results"]["fit"]["slope"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(report["command"], "scan-bilinear");
}

#[test]
fn failed_check_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    // the subcritical slope is far from zero, so a zero tolerance fails
    std::fs::write(&cfg, r#"{"scan": {"rows": [[1,1],[2,2],[3,3]], "cells_log2": 1, "refine": 1, "slope_tolerance": 0.0}}"#)
        .unwrap();
    let out = dir.path().join("out");
    let args = ["scan-bilinear", "--config", cfg.to_str().unwrap(), "--grid", SMALL, "--out", out.to_str().unwrap()];
    assert_eq!(run(&args).0, 5);
    assert!(out.join("report.json").exists());
}

#[test]
fn fit_decay_reports_c0() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig { grid: SpacetimeGrid::new(4.0, 4.0, 9, 16).unwrap(), enforce_checks: false, ..Default::default() };
    cfg.out = dir.path().to_path_buf();
    cfg.decay.gaps = vec![1, 2, 3];
    cfg.decay.resolution = 4;
    cfg.decay.same_j_gaps = vec![0, 1];
    let o = run_with(Cmd::FitDecay, cfg).unwrap();
    assert!(o.report.results["decay"]["c0_hat"].is_f64());
    assert!(o.report.checks.iter().any(|c| c.name == "c0_hat"));
    assert!(o.failed_checks().is_none());
    assert!(dir.path().join("decay.csv").exists() && dir.path().join("same_j.csv").exists());
}

#[test]
fn single_tile_sweep_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"sweep": {"generator": "single-tile", "count": 1, "resolution": 2}}"#).unwrap();
    let out = dir.path().join("out");
    let (code, stdout, err) =
        run(&["sweep", "--config", cfg.to_str().unwrap(), "--grid", SMALL, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["results"]["max_ratio"], report["results"]["reference_ratio"]);
    assert!(stdout.starts_with("max_ratio"));
}

#[test]
fn other_suites_run_and_rerun_identically() {
    let dir = tempfile::tempdir().unwrap();
    let small = SpacetimeGrid::new(4.0, 4.0, 9, 16).unwrap();
    let base = RunConfig { grid: small, enforce_checks: false, ..Default::default() };
    let mut cfg = base.clone();
    cfg.decouple = hypext::cli::DecoupleConfig { delta_log2: 1, gap: 4, resolution: 4, a_sep: 4.0 };
    cfg.necessity.depth = 2;
    cfg.search.budget = hypext::dyadic::rational(1, 4);
    cfg.search.resolution = 3;
    cfg.search.iterations = 5;
    for cmd in [Cmd::DecoupleCheck, Cmd::Necessity, Cmd::Search] {
        let mut a = cfg.clone();
        a.out = dir.path().join(format!("{}-a", cmd.name()));
        let mut b = cfg.clone();
        b.out = dir.path().join(format!("{}-b", cmd.name()));
        let (ra, rb) = (run_with(cmd, a).unwrap(), run_with(cmd, b).unwrap());
        let (ca, cb) = (csv_outputs(&ra.files).unwrap(), csv_outputs(&rb.files).unwrap());
        assert!(!ca.is_empty());
        assert_eq!(ca, cb, "{}", cmd.name());
        assert_eq!(ra.report.results, rb.report.results);
    }
}

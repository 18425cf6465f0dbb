//! Batch front end: configuration, dispatch and report files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::decomposition::{choose_j, fiber_slice, tile_cover_with, DyadicParam, StructureConfig};
use crate::dyadic::{rational, CellSet, ExponentPair, Rational};
use crate::error::{ensure, Error, Result};
use crate::extension::{extend, extension_norm, io::write_field, lp_norm, ratio, Density, QuadratureSpec, SpacetimeGrid};
use crate::harness::decay::{fit_decay_c0, hard_case_inputs, same_j_check, same_j_inputs};
use crate::harness::decouple::{check_decoupling, two_tile_family};
use crate::harness::generate::Generator;
use crate::harness::necessity::{necessity_experiment, BumpGeometry, NecessitySpec};
use crate::harness::scan::{scan_bilinear_exponent, ScanSpec, DEFAULT_ROWS};
use crate::harness::sweep::{main_ratio_sweep, SweepSpec};
use crate::search::{search_extremizer, SearchParams};

/// Rationals as `"7/4"` strings in config files.
mod ratio_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.trim().parse().map_err(|_| serde::de::Error::custom(format!("not a rational: {text:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub rows: Vec<(u32, u32)>,
    pub cells_log2: u32,
    pub refine: usize,
    /// Largest accepted `|slope - expected|`; 0.05 on the critical line and
    /// 0.1 elsewhere when absent.
    pub slope_tolerance: Option<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        let spec = ScanSpec::default();
        ScanConfig { rows: DEFAULT_ROWS.to_vec(), cells_log2: spec.cells_log2, refine: spec.refine, slope_tolerance: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    pub gaps: Vec<u32>,
    pub delta_log2: i32,
    pub resolution: u32,
    pub same_j_gaps: Vec<u32>,
    pub min_c0: f64,
    pub min_monotone_run: usize,
    pub same_j_tolerance: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            gaps: vec![1, 2, 3, 4, 5],
            delta_log2: 2,
            resolution: 6,
            same_j_gaps: vec![0, 1, 2, 3, 4],
            min_c0: 0.05,
            min_monotone_run: 4,
            same_j_tolerance: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoupleConfig {
    pub delta_log2: i32,
    /// `K` of the short tile; the tall one has `K = 0`.
    pub gap: u32,
    pub resolution: u32,
    pub a_sep: f64,
}

impl Default for DecoupleConfig {
    fn default() -> Self {
        DecoupleConfig { delta_log2: 2, gap: 8, resolution: 8, a_sep: 4.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NecessityConfig {
    #[serde(with = "ratio_str")]
    pub s: Rational,
    pub depth: u32,
    pub cells_log2: u32,
    pub refine: usize,
    /// Also run the vertically separated control.
    pub control: bool,
    pub growth_factor: f64,
}

impl Default for NecessityConfig {
    fn default() -> Self {
        NecessityConfig { s: rational(8, 5), depth: 5, cells_log2: 1, refine: 1, control: true, growth_factor: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub generator: Generator,
    pub count: usize,
    pub resolution: u32,
    /// Skips the exhaustive single-tile reference when set.
    pub reference: Option<f64>,
    pub max_factor: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { generator: Generator::Mixed, count: 200, resolution: 6, reference: None, max_factor: 4.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(with = "ratio_str")]
    pub budget: Rational,
    pub resolution: u32,
    pub iterations: usize,
    pub initial_temperature: f64,
    pub decay: f64,
    pub move_weights: [f64; 4],
}

impl Default for SearchConfig {
    fn default() -> Self {
        let p = SearchParams::default();
        SearchConfig {
            budget: rational(1, 16),
            resolution: 5,
            iterations: p.iterations,
            initial_temperature: p.initial_temperature,
            decay: p.decay,
            move_weights: p.move_weights,
        }
    }
}

/// Everything a run depends on; echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(with = "ratio_str")]
    pub s: Rational,
    #[serde(with = "ratio_str")]
    pub r: Rational,
    pub grid: SpacetimeGrid,
    pub quadrature: QuadratureSpec,
    pub structure: StructureConfig,
    pub seed: u64,
    /// Exit with code 5 when a suite check fails.
    pub enforce_checks: bool,
    pub set: Option<PathBuf>,
    pub out: PathBuf,
    pub scan: ScanConfig,
    pub decay: DecayConfig,
    pub decouple: DecoupleConfig,
    pub necessity: NecessityConfig,
    pub sweep: SweepConfig,
    pub search: SearchConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            s: rational(7, 4),
            r: rational(2, 1),
            grid: SpacetimeGrid::reference(),
            quadrature: QuadratureSpec::default(),
            structure: StructureConfig::default(),
            seed: 0,
            enforce_checks: true,
            set: None,
            out: PathBuf::from("out"),
            scan: ScanConfig::default(),
            decay: DecayConfig::default(),
            decouple: DecoupleConfig::default(),
            necessity: NecessityConfig::default(),
            sweep: SweepConfig::default(),
            search: SearchConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn exponents(&self) -> Result<ExponentPair> {
        ExponentPair::new(self.s, self.r)
    }

    pub fn search_params(&self) -> SearchParams {
        SearchParams {
            seed: self.seed,
            iterations: self.search.iterations,
            initial_temperature: self.search.initial_temperature,
            decay: self.search.decay,
            move_weights: self.search.move_weights,
        }
    }

    /// Re-runs the checks of every component.
    pub fn validate(&self) -> Result<()> {
        self.exponents()?;
        ExponentPair::with_bounds_unchecked(self.necessity.s, rational(2, 1))?;
        SpacetimeGrid::anisotropic(self.grid.r, self.grid.m)?;
        self.quadrature.validate()?;
        self.structure.validate()?;
        self.search_params().validate()?;
        ensure!(self.sweep.count >= 1, Input, "sweep count must be >= 1");
        Ok(())
    }
}

/// `Rt,Rx,Mt,Mx`.
pub fn parse_grid(text: &str) -> Result<SpacetimeGrid> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    ensure!(parts.len() == 4, Input, "--grid expects Rt,Rx,Mt,Mx, got {text:?}");
    let f = |s: &str| s.parse::<f64>().map_err(|_| Error::Input(format!("bad number {s:?} in --grid")));
    let u = |s: &str| s.parse::<usize>().map_err(|_| Error::Input(format!("bad count {s:?} in --grid")));
    SpacetimeGrid::new(f(parts[0])?, f(parts[1])?, u(parts[2])?, u(parts[3])?)
}

#[derive(Debug, Parser)]
#[command(name = "hypext", version, about = "Extension operator lab for tau = xi_1 xi_2")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Cell set JSON file.
    #[arg(long, global = true)]
    pub set: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// `Rt,Rx,Mt,Mx`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Fiber slicing and tile covers of a set.
    Decompose,
    /// Field dump of the extension of a set.
    Extend,
    /// `||E chi||_{2s}` of a set.
    Norm,
    ScanBilinear,
    FitDecay,
    DecoupleCheck,
    Necessity,
    Sweep,
    Search,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Decompose,
        Command::Extend,
        Command::Norm,
        Command::ScanBilinear,
        Command::FitDecay,
        Command::DecoupleCheck,
        Command::Necessity,
        Command::Sweep,
        Command::Search,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::Extend => "extend",
            Command::Norm => "norm",
            Command::ScanBilinear => "scan-bilinear",
            Command::FitDecay => "fit-decay",
            Command::DecoupleCheck => "decouple-check",
            Command::Necessity => "necessity",
            Command::Sweep => "sweep",
            Command::Search => "search",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::Input(format!("unknown command {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.to_string(), passed, detail }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub results: Value,
    pub checks: Vec<Check>,
    pub version: String,
    pub threads: usize,
    pub wall_time_s: f64,
}

/// A finished run: the report, the files written and the text for stdout.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub files: Vec<PathBuf>,
    pub stdout: String,
}

impl Outcome {
    /// The error that sets the exit code when enforced checks failed.
    pub fn failed_checks(&self) -> Option<Error> {
        let bad: Vec<&str> = self.report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        (self.report.config.enforce_checks && !bad.is_empty()).then(|| Error::Suite(bad.join(", ")))
    }
}

/// Config file, then flags.
pub fn resolve_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &common.set {
        cfg.set = Some(s.clone());
    }
    if let Some(o) = &common.out {
        cfg.out = o.clone();
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(g) = &common.grid {
        cfg.grid = parse_grid(g)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let p = self.dir.join(name);
        std::fs::write(&p, bytes)?;
        self.files.push(p);
        Ok(())
    }
}

fn load_set(cfg: &RunConfig) -> Result<CellSet> {
    let path = cfg.set.as_ref().ok_or_else(|| Error::Input("this command needs --set".into()))?;
    CellSet::from_json(&std::fs::read_to_string(path)?)
}

/// Twelve significant digits.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = resolve_config(&cli.common)?;
    run_with(cli.command, cfg)
}

pub fn run_with(command: Command, cfg: RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    std::fs::create_dir_all(&cfg.out)?;
    let mut w = Writer { dir: cfg.out.clone(), files: vec![] };
    let mut stdout = String::new();
    let mut checks = vec![];
    let (g, q) = (&cfg.grid, &cfg.quadrature);
    let results = match command {
        Command::Decompose => {
            let set = load_set(&cfg)?;
            let fd = fiber_slice(&set)?;
            fd.verify()?;
            let mut summary = String::from("K,J,delta,tile_count,residual_measure\n");
            let mut parts = vec![];
            for (&k, part) in &fd.parts {
                let j = choose_j(part)?;
                let cover = tile_cover_with(part, j, k, &cfg.structure)?;
                cover.verify(part)?;
                w.put(&format!("cover_K{k}.json"), cover.to_json().as_bytes())?;
                for (d, e) in &cover.entries {
                    writeln!(summary, "{k},{j},{},{},{}", d.value(), e.tiles.len(), e.residual.measure_f64()).unwrap();
                }
                let violations = cover.count_violations(&cfg.structure);
                checks.push(check(
                    &format!("tile count bound K={k}"),
                    violations.is_empty(),
                    format!("{} entries over A delta^-C", violations.len()),
                ));
                parts.push(json!({"K": k, "J": j, "tiles": cover.tile_count(), "measure": part.measure_f64()}));
            }
            w.put("summary.csv", summary.as_bytes())?;
            writeln!(stdout, "{} parts, measure {}", fd.parts.len(), set.measure()).unwrap();
            json!({ "parts": parts, "measure": set.measure_f64() })
        }
        Command::Extend | Command::Norm => {
            let set = load_set(&cfg)?;
            let p = cfg.exponents()?.two_s();
            let f = Density::indicator(set);
            let norm = if command == Command::Extend {
                let field = extend(&f, g, q)?;
                let mut buf = vec![];
                write_field(&field, &mut buf)?;
                w.put("field.bin", &buf)?;
                lp_norm(&field, p)?
            } else {
                extension_norm(&f, g, q, p)?
            };
            writeln!(stdout, "{}", sig12(norm)).unwrap();
            json!({ "p": p, "norm": norm, "measure": f.measure() })
        }
        Command::ScanBilinear => {
            let e = cfg.exponents()?;
            let spec = ScanSpec { cells_log2: cfg.scan.cells_log2, refine: cfg.scan.refine };
            let r = scan_bilinear_exponent(&e, &cfg.scan.rows, g, q, &spec)?;
            w.put("scan.csv", r.to_csv().as_bytes())?;
            let tol = cfg.scan.slope_tolerance.unwrap_or(if e.is_critical() { 0.05 } else { 0.1 });
            if let (Some(s), Some(x)) = (r.slope(), r.expected_slope) {
                checks.push(check("slope", (s - x).abs() <= tol, format!("slope {s:.6}, expected {x:.6}, tolerance {tol}")));
                writeln!(stdout, "slope {s:.6} (expected {x:.6})").unwrap();
            }
            serde_json::to_value(&r)?
        }
        Command::FitDecay => {
            let e = cfg.exponents()?;
            let dc = &cfg.decay;
            let delta = DyadicParam::from_log2_inv(dc.delta_log2);
            let fit = fit_decay_c0(&hard_case_inputs(&dc.gaps, delta, dc.resolution, g)?, delta, &e, q)?;
            w.put("decay.csv", fit.to_csv().as_bytes())?;
            checks.push(check("c0_hat", fit.c0_hat > dc.min_c0, format!("c0_hat {:.6} vs {}", fit.c0_hat, dc.min_c0)));
            checks.push(check(
                "monotone run",
                fit.monotone_run >= dc.min_monotone_run,
                format!("{} consecutive gaps, need {}", fit.monotone_run, dc.min_monotone_run),
            ));
            let mut same = vec![];
            if !dc.same_j_gaps.is_empty() {
                let unit = ratio(&CellSet::full(dc.resolution, crate::dyadic::Domain::Unit)?, &e, g, q)?;
                same = same_j_check(&same_j_inputs(&dc.same_j_gaps, delta, dc.resolution, g)?, &e, q, g, unit)?;
                let mut csv = String::from("gap,measured,predicted,relative_error\n");
                for r in &same {
                    writeln!(csv, "{},{},{},{}", r.gap, r.measured, r.predicted, r.relative_error).unwrap();
                }
                w.put("same_j.csv", csv.as_bytes())?;
                let worst = same.iter().map(|r| r.relative_error).fold(0.0, f64::max);
                checks.push(check(
                    "same J prediction",
                    worst <= dc.same_j_tolerance,
                    format!("worst relative error {worst:.4}"),
                ));
            }
            writeln!(stdout, "c0_hat {:.6}, monotone over {} gaps", fit.c0_hat, fit.monotone_run).unwrap();
            json!({ "decay": fit, "same_j": same })
        }
        Command::DecoupleCheck => {
            let e = cfg.exponents()?;
            let dc = &cfg.decouple;
            let fam = two_tile_family(dc.gap, dc.resolution)?;
            let r = check_decoupling(&fam, DyadicParam::from_log2_inv(dc.delta_log2), &e, g, q, dc.a_sep)?;
            let mut csv = String::from("K1,K2,K3,K4,multiplicity,value,holder_bound\n");
            for t in &r.terms {
                let [a, b, c, d] = t.keys;
                writeln!(csv, "{a},{b},{c},{d},{},{},{}", t.multiplicity, t.value, t.holder_bound).unwrap();
            }
            w.put("decouple.csv", csv.as_bytes())?;
            checks.push(check("decoupled bound", r.holds, format!("L {:.6} vs bound {:.6}", r.l, r.bound)));
            writeln!(stdout, "L {:.6}, bound {:.6}, slack {:.4}", r.l, r.bound, r.slack).unwrap();
            serde_json::to_value(&r)?
        }
        Command::Necessity => {
            let nc = &cfg.necessity;
            let e = ExponentPair::with_bounds_unchecked(nc.s, rational(2, 1))?;
            let spec = NecessitySpec { geometry: BumpGeometry::Unseparated, cells_log2: nc.cells_log2, refine: nc.refine };
            let main = necessity_experiment(nc.depth, &e, g, q, &spec)?;
            w.put("necessity.csv", main.to_csv().as_bytes())?;
            let base = main.rows[0].normalized;
            let last = main.rows.last().unwrap().normalized;
            checks.push(check("monotone growth", main.increasing(), format!("{} rows", main.rows.len())));
            checks.push(check(
                "growth factor",
                last > nc.growth_factor * base,
                format!("m = {} gives {:.4} x the m = 0 value", nc.depth, last / base),
            ));
            let mut control = Value::Null;
            if nc.control {
                let ctl = necessity_experiment(nc.depth, &e, g, q, &NecessitySpec { geometry: BumpGeometry::Separated, ..spec })?;
                w.put("necessity_control.csv", ctl.to_csv().as_bytes())?;
                let cb = ctl.rows[0].normalized;
                let worst = ctl.rows.iter().map(|r| r.normalized / cb).fold(0.0, f64::max);
                checks.push(check("control bounded", worst <= nc.growth_factor, format!("max {worst:.4} x baseline")));
                control = serde_json::to_value(&ctl)?;
            }
            writeln!(stdout, "growth {:.4}x over m = 0..{}", last / base, nc.depth).unwrap();
            json!({ "unseparated": main, "control": control })
        }
        Command::Sweep => {
            let e = cfg.exponents()?;
            let sc = &cfg.sweep;
            let spec = SweepSpec { generator: sc.generator, count: sc.count, seed: cfg.seed, resolution: sc.resolution };
            let rep = main_ratio_sweep(&spec, &e, g, q, &cfg.structure, sc.reference)?;
            w.put("sweep.csv", rep.to_csv().as_bytes())?;
            checks.push(check(
                "bounded by reference",
                rep.max_ratio <= sc.max_factor * rep.reference_ratio,
                format!("max {:.6} vs reference {:.6}", rep.max_ratio, rep.reference_ratio),
            ));
            writeln!(stdout, "max_ratio {} reference {}", sig12(rep.max_ratio), sig12(rep.reference_ratio)).unwrap();
            serde_json::to_value(&rep)?
        }
        Command::Search => {
            let e = cfg.exponents()?;
            let sc = &cfg.search;
            let out = search_extremizer(&e, sc.budget, sc.resolution, &cfg.search_params(), g, q, None)?;
            w.put("trace.csv", out.trace_csv().as_bytes())?;
            w.put("best.json", out.best.cellset().to_json().as_bytes())?;
            checks.push(check(
                "best at least start",
                out.best_ratio >= out.start_ratio,
                format!("{:.6} from {:.6}", out.best_ratio, out.start_ratio),
            ));
            writeln!(stdout, "best ratio {} with {} tiles", sig12(out.best_ratio), out.best.tiles().len()).unwrap();
            let tiles: Vec<[i64; 4]> = out.best.tiles().iter().map(|t| t.to_array()).collect();
            json!({ "best_ratio": out.best_ratio, "start_ratio": out.start_ratio, "best_tiles": tiles })
        }
    };
    for c in checks.iter().filter(|c| !c.passed) {
        writeln!(stdout, "check failed: {}: {}", c.name, c.detail).unwrap();
    }
    let report = Report {
        command: command.name().to_string(),
        config: cfg,
        results,
        checks,
        version: env!("CARGO_PKG_VERSION").to_string(),
        threads: rayon::current_num_threads(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    w.put("report.json", serde_json::to_string_pretty(&report)?.as_bytes())?;
    Ok(Outcome { report, files: w.files, stdout })
}

/// CSV files of a run keyed by name, for comparing reruns.
pub fn csv_outputs(files: &[PathBuf]) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for f in files.iter().filter(|f| f.extension().is_some_and(|e| e == "csv")) {
        out.insert(f.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(f)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flag() {
        let g = parse_grid("8, 8,65,128").unwrap();
        assert_eq!(g, SpacetimeGrid::reference());
        assert!(parse_grid("8,8,65").is_err());
        assert!(parse_grid("8,x,65,128").is_err());
    }

    #[test]
    fn config_round_trip_and_partial() {
        let c = RunConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"s\":\"7/4\""));
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
        let p: RunConfig = serde_json::from_str(r#"{"r": "7/3", "sweep": {"count": 3}}"#).unwrap();
        assert!(p.exponents().unwrap().is_critical());
        assert_eq!(p.sweep.count, 3);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
        let bad: RunConfig = serde_json::from_str(r#"{"s": "5/2"}"#).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn command_names() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("plot".parse::<Command>().is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(4.963690063467746), "4.96369006347e0");
    }
}

//! Result types shared by the suites, with their CSV forms.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::fit::{least_squares, LineFit};
use crate::error::{ensure, Result};

/// Quotes a CSV field when it needs it.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One measurement: its parameters, the fit abscissa, the raw norm and the
/// normalized quantity whose `log2` is fitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub params: Vec<i64>,
    pub x: f64,
    pub norm: f64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub param_names: Vec<String>,
    pub rows: Vec<ScanRow>,
    /// Least squares of `log2(normalized)` against `x`.
    pub fit: Option<LineFit>,
    pub expected_slope: Option<f64>,
    pub notes: Vec<String>,
}

impl ScanResult {
    /// Fits when there are at least three rows.
    pub fn new(param_names: &[&str], rows: Vec<ScanRow>, expected_slope: Option<f64>) -> Self {
        let fit = (rows.len() >= 3).then(|| {
            let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.normalized.log2()).collect();
            least_squares(&xs, &ys)
        });
        ScanResult {
            param_names: param_names.iter().map(|s| s.to_string()).collect(),
            rows,
            fit,
            expected_slope,
            notes: vec![],
        }
    }

    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    /// Whether `normalized` rises strictly from each row to the next.
    pub fn increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].normalized > w[0].normalized)
    }

    pub fn decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].normalized < w[0].normalized)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.param_names.join(",");
        out.push_str(",x,norm,normalized,log2_normalized\n");
        for r in &self.rows {
            for p in &r.params {
                write!(out, "{p},").unwrap();
            }
            writeln!(out, "{},{},{},{}", r.x, r.norm, r.normalized, r.normalized.log2()).unwrap();
        }
        out
    }
}

/// One pair of a decay fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayPair {
    pub k: u32,
    pub k_prime: u32,
    pub j: u32,
    pub j_prime: u32,
    pub lhs: f64,
    pub rhs: f64,
    /// `||E chi||_{2s} ||E chi'||_{2s}` on the same grid, which bounds `lhs`.
    pub cauchy_schwarz: f64,
}

impl DecayPair {
    pub fn gap(&self) -> u32 {
        self.k.abs_diff(self.k_prime)
    }

    pub fn normalized(&self) -> f64 {
        self.lhs / self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub c0_hat: f64,
    pub fit: LineFit,
    pub pairs: Vec<DecayPair>,
    /// Longest run of consecutive gaps over which the normalized product
    /// strictly decreases.
    pub monotone_run: usize,
    pub notes: Vec<String>,
}

impl DecayFit {
    /// Fits `log2(lhs / rhs) ~ -c0 |K - K'| + b` over `pairs`.
    pub fn from_pairs(pairs: Vec<DecayPair>) -> Result<Self> {
        ensure!(pairs.len() >= 2, Input, "a decay fit needs at least two pairs, got {}", pairs.len());
        let xs: Vec<f64> = pairs.iter().map(|p| p.gap() as f64).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.normalized().log2()).collect();
        ensure!(
            xs.iter().any(|&x| x != xs[0]),
            Input,
            "all pairs share the gap {}",
            xs[0]
        );
        let fit = least_squares(&xs, &ys);
        let mut by_gap: Vec<(u32, f64)> = pairs.iter().map(|p| (p.gap(), p.normalized())).collect();
        by_gap.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (mut run, mut best) = (1, 1);
        for w in by_gap.windows(2) {
            if w[1].0 == w[0].0 + 1 && w[1].1 < w[0].1 {
                run += 1;
            } else {
                run = 1;
            }
            best = best.max(run);
        }
        Ok(DecayFit { c0_hat: -fit.slope, fit, pairs, monotone_run: best, notes: vec![] })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("K,K_prime,J,J_prime,gap,lhs,rhs,normalized,cauchy_schwarz\n");
        for p in &self.pairs {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                p.k,
                p.k_prime,
                p.j,
                p.j_prime,
                p.gap(),
                p.lhs,
                p.rhs,
                p.normalized(),
                p.cauchy_schwarz
            )
            .unwrap();
        }
        out
    }
}

/// One set of a suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteCase {
    pub descriptor: String,
    pub ratio: f64,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub cases: Vec<SuiteCase>,
    pub max_ratio: f64,
    /// Best single-tile ratio on the same grid.
    pub reference_ratio: f64,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(cases: Vec<SuiteCase>, reference_ratio: f64) -> Self {
        let max_ratio = cases.iter().map(|c| c.ratio).fold(0.0, f64::max);
        SuiteReport { cases, max_ratio, reference_ratio, notes: vec![] }
    }

    pub fn argmax(&self) -> Option<&SuiteCase> {
        self.cases.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio))
    }

    pub fn to_csv(&self) -> String {
        let keys: std::collections::BTreeSet<&String> =
            self.cases.iter().flat_map(|c| c.diagnostics.keys()).collect();
        let mut out = String::from("descriptor,ratio");
        for k in &keys {
            write!(out, ",{}", csv_field(k)).unwrap();
        }
        out.push('\n');
        for c in &self.cases {
            write!(out, "{},{}", csv_field(&c.descriptor), c.ratio).unwrap();
            for k in &keys {
                match c.diagnostics.get(*k) {
                    Some(v) => write!(out, ",{v}").unwrap(),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{choose_j, stage1, stage2, stage3, tile_cover_with, DyadicParam, FiberDecomposition, StructureConfig};
use crate::dyadic::{CellSet, ExponentPair};
use crate::error::Result;
use crate::extension::{extension_norm, Density, QuadratureSpec, SpacetimeGrid};

/// How many random subsets to add to the structural probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub count: usize,
    pub seed: u64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec { count: 4, seed: 0 }
    }
}

/// Subsets of `part` tested against `|part|`: the part itself, every stratum
/// of every stage, every cover tile cut down to the part, and seeded random
/// halves. Duplicates are dropped; order is deterministic.
pub fn probe_family(
    part: &CellSet,
    k: u32,
    probes: &ProbeSpec,
    cfg: &StructureConfig,
) -> Result<Vec<(String, CellSet)>> {
    let mut out: Vec<(String, CellSet)> = vec![];
    let mut push = |name: String, s: CellSet| {
        if !s.is_empty() && !out.iter().any(|(_, t)| *t == s) {
            out.push((name, s));
        }
    };
    if part.is_empty() {
        return Ok(vec![]);
    }
    push(format!("K={k} whole"), part.clone());
    let j = choose_j(part)?;
    let s1 = stage1(part, j, cfg);
    for st1 in &s1.strata {
        push(format!("K={k} {}", st1.label), st1.body.clone());
        for st2 in &stage2(st1, j, cfg).strata {
            push(format!("K={k} {}", st2.label), st2.body.clone());
            for st3 in &stage3(st2, k, cfg).strata {
                push(format!("K={k} {}", st3.label), st3.body.clone());
            }
        }
    }
    let cover = tile_cover_with(part, j, k, cfg)?;
    for (d, entry) in &cover.entries {
        for t in &entry.tiles {
            push(format!("K={k} delta={d} tile {t}"), part.restrict_tile(t));
        }
    }
    let mut rng = crate::harness::generate::rng(probes.seed ^ (k as u64).wrapping_mul(0xA24B_AED4_963E_E407));
    for i in 0..probes.count {
        let sub = part.filter(|_, _| rng.gen_bool(0.5));
        push(format!("K={k} random {i}"), sub);
    }
    Ok(out)
}

/// `||E chi_probe||_{2s} / |part|^{1/s'}` for every probe of `part`.
pub fn probe_ratios(
    part: &CellSet,
    k: u32,
    e: &ExponentPair,
    probes: &ProbeSpec,
    grid: &SpacetimeGrid,
    q: &QuadratureSpec,
    cfg: &StructureConfig,
) -> Result<Vec<(String, f64)>> {
    let scale = part.measure_f64().powf(e.inv_s_dual());
    probe_family(part, k, probes, cfg)?
        .into_iter()
        .map(|(name, s)| {
            Ok((name, extension_norm(&Density::indicator(s), grid, q, e.two_s())? / scale))
        })
        .collect()
}

/// Smallest dyadic bound on the probe ratios of each nonempty part.
pub fn epsilon_class(
    fd: &FiberDecomposition,
    e: &ExponentPair,
    probes: &ProbeSpec,
    grid: &SpacetimeGrid,
    q: &QuadratureSpec,
    cfg: &StructureConfig,
) -> Result<BTreeMap<u32, DyadicParam>> {
    let mut out = BTreeMap::new();
    for (&k, part) in &fd.parts {
        if part.is_empty() {
            continue;
        }
        let best = probe_ratios(part, k, e, probes, grid, q, cfg)?
            .into_iter()
            .map(|(_, r)| r)
            .fold(0.0, f64::max);
        if let Some(p) = DyadicParam::round_up(best) {
            out.insert(k, p);
        }
    }
    Ok(out)
}

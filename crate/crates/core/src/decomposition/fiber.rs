use std::collections::BTreeMap;

use crate::dyadic::{dyadic_bin, CellSet, Domain};
use crate::error::{ensure, Result};

/// `Omega` split by vertical fiber length: `parts[K]` holds the columns whose
/// fiber length lies in `(2^{-K-1}, 2^{-K}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberDecomposition {
    pub source: CellSet,
    pub parts: BTreeMap<u32, CellSet>,
}

impl FiberDecomposition {
    /// Checks that the parts partition the source and are binned correctly.
    pub fn verify(&self) -> Result<()> {
        let res = self.source.resolution();
        let mut total = 0;
        for (&k, part) in &self.parts {
            ensure!(!part.is_empty(), Invariant, "empty part K={k}");
            ensure!(part.is_subset(&self.source), Invariant, "part K={k} leaves the source");
            for (p, count) in part.column_counts() {
                ensure!(
                    self.source.column_count(p) == count,
                    Invariant,
                    "column {p} split across parts"
                );
                ensure!(dyadic_bin(count as u64, res) == Some(k), Invariant, "column {p} in wrong part {k}");
            }
            total += part.len();
        }
        ensure!(total == self.source.len(), Invariant, "parts do not cover the source");
        Ok(())
    }
}

pub fn fiber_slice(omega: &CellSet) -> Result<FiberDecomposition> {
    ensure!(omega.domain() == Domain::Unit, Domain, "fiber slicing runs on the unit domain");
    let res = omega.resolution();
    let mut cells: BTreeMap<u32, Vec<(i64, i64)>> = BTreeMap::new();
    for (_, column) in omega.columns() {
        let k = dyadic_bin(column.len() as u64, res).expect("nonempty column of a unit-domain set");
        cells.entry(k).or_default().extend_from_slice(column);
    }
    let parts = cells
        .into_iter()
        .map(|(k, c)| (k, CellSet::from_sorted_unchecked(res, Domain::Unit, c)))
        .collect();
    Ok(FiberDecomposition { source: omega.clone(), parts })
}

/// The unique `J` with `|pi_1(Omega)|` in `(2^{-J-1}, 2^{-J}]`.
pub fn choose_j(omega: &CellSet) -> Result<u32> {
    ensure!(!omega.is_empty(), Input, "choose_J of an empty set");
    let shadow = omega.project1();
    dyadic_bin(shadow.len() as u64, omega.resolution())
        .ok_or_else(|| crate::Error::Domain("horizontal shadow longer than 1".into()))
}

//! Finite unions of grid cells.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DyadicInterval, Domain, Rational, Tile, N_MAX};
use crate::error::{ensure, Error, Result};

/// A set in the plane given as a union of cells `[p, p+1] x [q, q+1] * 2^{-N}`.
///
/// Cells are kept sorted by `(p, q)`, so the cells of a column are contiguous.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellSet {
    resolution: u32,
    domain: Domain,
    cells: Vec<(i64, i64)>,
}

#[derive(Serialize, Deserialize)]
struct CellSetFile {
    resolution: u32,
    domain: Domain,
    cells: Vec<[i64; 2]>,
}

impl CellSet {
    /// Builds a set from arbitrary-order cells; duplicates and out-of-domain
    /// cells are rejected.
    pub fn new(resolution: u32, domain: Domain, mut cells: Vec<(i64, i64)>) -> Result<Self> {
        ensure!(resolution <= N_MAX, Domain, "resolution {resolution} exceeds N_max = {N_MAX}");
        cells.sort_unstable();
        if let Some(w) = cells.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Input(format!("duplicate cell {:?}", w[0])));
        }
        if let Some(c) = cells
            .iter()
            .find(|&&(p, q)| !domain.contains_index(resolution, p) || !domain.contains_index(resolution, q))
        {
            return Err(Error::Input(format!("cell {c:?} outside the {domain:?} domain at resolution {resolution}")));
        }
        Ok(CellSet { resolution, domain, cells })
    }

    /// Like [`CellSet::new`] but silently merges duplicates.
    pub fn from_cells_dedup(resolution: u32, domain: Domain, mut cells: Vec<(i64, i64)>) -> Result<Self> {
        cells.sort_unstable();
        cells.dedup();
        Self::new(resolution, domain, cells)
    }

    pub(crate) fn from_sorted_unchecked(resolution: u32, domain: Domain, cells: Vec<(i64, i64)>) -> Self {
        debug_assert!(cells.windows(2).all(|w| w[0] < w[1]));
        CellSet { resolution, domain, cells }
    }

    pub fn empty(resolution: u32, domain: Domain) -> Self {
        CellSet { resolution, domain, cells: Vec::new() }
    }

    /// The whole domain.
    pub fn full(resolution: u32, domain: Domain) -> Result<Self> {
        let (lo, hi) = domain.index_range(resolution);
        let cells = (lo..hi).flat_map(|p| (lo..hi).map(move |q| (p, q))).collect();
        Self::new(resolution, domain, cells)
    }

    /// All cells of `tile` at `resolution`.
    pub fn from_tile(tile: &Tile, resolution: u32, domain: Domain) -> Result<Self> {
        ensure!(
            tile.h.n <= resolution && tile.v.n <= resolution,
            Domain,
            "tile {tile} is finer than resolution {resolution}"
        );
        ensure!(tile.in_domain(domain), Domain, "tile {tile} outside the {domain:?} domain");
        let rows = tile.v.cell_range(resolution);
        let cells = tile
            .h
            .cell_range(resolution)
            .flat_map(|p| rows.clone().map(move |q| (p, q)))
            .collect();
        Ok(CellSet { resolution, domain, cells })
    }

    /// Union of tiles; overlapping tiles are allowed.
    pub fn from_tiles<'a>(tiles: impl IntoIterator<Item = &'a Tile>, resolution: u32, domain: Domain) -> Result<Self> {
        let mut out = CellSet::empty(resolution, domain);
        for t in tiles {
            out = out.union(&CellSet::from_tile(t, resolution, domain)?);
        }
        Ok(out)
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn cells(&self) -> &[(i64, i64)] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cell side `2^{-N}`.
    pub fn cell_size(&self) -> f64 {
        (-(self.resolution as f64)).exp2()
    }

    /// Exact area `count * 2^{-2N}`.
    pub fn measure(&self) -> Rational {
        Rational::new(self.cells.len() as i64, 1i64 << (2 * self.resolution))
    }

    pub fn measure_f64(&self) -> f64 {
        self.cells.len() as f64 * self.cell_size() * self.cell_size()
    }

    pub fn contains(&self, p: i64, q: i64) -> bool {
        self.cells.binary_search(&(p, q)).is_ok()
    }

    fn check_compatible(&self, other: &CellSet) {
        assert_eq!(self.resolution, other.resolution, "cell sets at different resolutions");
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        self.check_compatible(other);
        let mut cells = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.cells.len() && j < other.cells.len() {
            match self.cells[i].cmp(&other.cells[j]) {
                std::cmp::Ordering::Less => {
                    cells.push(self.cells[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    cells.push(other.cells[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    cells.push(self.cells[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        cells.extend_from_slice(&self.cells[i..]);
        cells.extend_from_slice(&other.cells[j..]);
        let domain = if self.domain == Domain::Signed || other.domain == Domain::Signed {
            Domain::Signed
        } else {
            Domain::Unit
        };
        CellSet { resolution: self.resolution, domain, cells }
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        self.check_compatible(other);
        self.filter(|p, q| other.contains(p, q))
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        self.check_compatible(other);
        self.filter(|p, q| !other.contains(p, q))
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.resolution == other.resolution && self.cells.iter().all(|&(p, q)| other.contains(p, q))
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.cells.iter().all(|&(p, q)| !other.contains(p, q))
    }

    pub fn filter(&self, mut keep: impl FnMut(i64, i64) -> bool) -> CellSet {
        CellSet {
            resolution: self.resolution,
            domain: self.domain,
            cells: self.cells.iter().copied().filter(|&(p, q)| keep(p, q)).collect(),
        }
    }

    /// Horizontal shadow: the columns holding at least one cell.
    pub fn project1(&self) -> CellSet1D {
        let mut cols: Vec<i64> = self.cells.iter().map(|c| c.0).collect();
        cols.dedup();
        CellSet1D::from_sorted_unchecked(self.resolution, self.domain, cols)
    }

    /// Vertical shadow: the rows holding at least one cell.
    pub fn project2(&self) -> CellSet1D {
        let mut rows: Vec<i64> = self.cells.iter().map(|c| c.1).collect();
        rows.sort_unstable();
        rows.dedup();
        CellSet1D::from_sorted_unchecked(self.resolution, self.domain, rows)
    }

    /// Number of cells in column `p`.
    pub fn column_count(&self, p: i64) -> usize {
        let lo = self.cells.partition_point(|c| c.0 < p);
        let hi = self.cells.partition_point(|c| c.0 <= p);
        hi - lo
    }

    /// Length of the vertical fiber over column `p`.
    pub fn fiber_length(&self, p: i64) -> Rational {
        Rational::new(self.column_count(p) as i64, 1i64 << self.resolution)
    }

    /// Cell counts per nonempty column.
    pub fn column_counts(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for &(p, _) in &self.cells {
            *out.entry(p).or_insert(0) += 1;
        }
        out
    }

    /// Cell counts per nonempty row.
    pub fn row_counts(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for &(_, q) in &self.cells {
            *out.entry(q).or_insert(0) += 1;
        }
        out
    }

    /// Iterates over columns as `(p, rows)` with rows sorted.
    pub fn columns(&self) -> impl Iterator<Item = (i64, &[(i64, i64)])> {
        self.cells.chunk_by(|a, b| a.0 == b.0).map(|chunk| (chunk[0].0, chunk))
    }

    /// Cells whose column lies in `cols`.
    pub fn restrict_columns(&self, cols: &CellSet1D) -> CellSet {
        self.filter(|p, _| cols.contains(p))
    }

    /// Cells whose row lies in `rows`.
    pub fn restrict_rows(&self, rows: &CellSet1D) -> CellSet {
        self.filter(|_, q| rows.contains(q))
    }

    /// Cells inside `tile`.
    pub fn restrict_tile(&self, tile: &Tile) -> CellSet {
        let res = self.resolution;
        self.filter(|p, q| tile.contains_cell(res, p, q))
    }

    /// Number of cells inside `tile`.
    pub fn count_in_tile(&self, tile: &Tile) -> usize {
        let range = tile.h.cell_range(self.resolution);
        let lo = self.cells.partition_point(|c| c.0 < range.start);
        let hi = self.cells.partition_point(|c| c.0 < range.end);
        let res = self.resolution;
        self.cells[lo..hi]
            .iter()
            .filter(|&&(_, q)| tile.v.contains_cell(res, q))
            .count()
    }

    /// Tiles of `D_{j,k}` that meet the set, sorted.
    pub fn tiles_meeting(&self, j: u32, k: u32) -> Vec<Tile> {
        assert!(j <= self.resolution && k <= self.resolution);
        let mut tiles: Vec<Tile> = self
            .cells
            .iter()
            .map(|&(p, q)| Tile {
                h: DyadicInterval::containing(self.resolution, p, j),
                v: DyadicInterval::containing(self.resolution, q, k),
            })
            .collect();
        tiles.sort_unstable();
        tiles.dedup();
        tiles
    }

    /// Same set described at a finer resolution.
    pub fn refine(&self, resolution: u32) -> Result<CellSet> {
        ensure!(resolution >= self.resolution, Domain, "refine cannot coarsen");
        ensure!(resolution <= N_MAX, Domain, "resolution {resolution} exceeds N_max = {N_MAX}");
        let shift = resolution - self.resolution;
        let f = 1i64 << shift;
        let mut cells = Vec::with_capacity(self.cells.len() << (2 * shift));
        for &(p, q) in &self.cells {
            for dp in 0..f {
                for dq in 0..f {
                    cells.push((p * f + dp, q * f + dq));
                }
            }
        }
        cells.sort_unstable();
        Ok(CellSet { resolution, domain: self.domain, cells })
    }

    /// Shift by whole cells, landing in `domain`.
    pub fn translate(&self, dp: i64, dq: i64, domain: Domain) -> Result<CellSet> {
        let cells = self.cells.iter().map(|&(p, q)| (p + dp, q + dq)).collect();
        CellSet::new(self.resolution, domain, cells)
    }

    /// Mirror image under `(xi_1, xi_2) -> (xi_2, xi_1)`.
    pub fn transpose(&self) -> CellSet {
        let mut cells: Vec<_> = self.cells.iter().map(|&(p, q)| (q, p)).collect();
        cells.sort_unstable();
        CellSet { resolution: self.resolution, domain: self.domain, cells }
    }

    /// Same cells read in another domain.
    pub fn with_domain(&self, domain: Domain) -> Result<CellSet> {
        CellSet::new(self.resolution, domain, self.cells.clone())
    }

    pub fn to_json(&self) -> String {
        let file = CellSetFile {
            resolution: self.resolution,
            domain: self.domain,
            cells: self.cells.iter().map(|&(p, q)| [p, q]).collect(),
        };
        serde_json::to_string(&file).expect("cell set serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<CellSet> {
        let file: CellSetFile = serde_json::from_str(text)?;
        CellSet::new(file.resolution, file.domain, file.cells.into_iter().map(|[p, q]| (p, q)).collect())
    }
}

impl Serialize for CellSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        CellSetFile {
            resolution: self.resolution,
            domain: self.domain,
            cells: self.cells.iter().map(|&(p, q)| [p, q]).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CellSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let file = CellSetFile::deserialize(de)?;
        CellSet::new(file.resolution, file.domain, file.cells.into_iter().map(|[p, q]| (p, q)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// A subset of a line: a union of cells `[p, p+1] * 2^{-N}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellSet1D {
    resolution: u32,
    domain: Domain,
    cells: Vec<i64>,
}

impl CellSet1D {
    pub fn new(resolution: u32, domain: Domain, mut cells: Vec<i64>) -> Result<Self> {
        ensure!(resolution <= N_MAX, Domain, "resolution {resolution} exceeds N_max = {N_MAX}");
        cells.sort_unstable();
        if let Some(w) = cells.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Input(format!("duplicate cell {}", w[0])));
        }
        if let Some(c) = cells.iter().find(|&&p| !domain.contains_index(resolution, p)) {
            return Err(Error::Input(format!("cell {c} outside the {domain:?} domain")));
        }
        Ok(CellSet1D { resolution, domain, cells })
    }

    pub(crate) fn from_sorted_unchecked(resolution: u32, domain: Domain, cells: Vec<i64>) -> Self {
        debug_assert!(cells.windows(2).all(|w| w[0] < w[1]));
        CellSet1D { resolution, domain, cells }
    }

    pub fn empty(resolution: u32, domain: Domain) -> Self {
        CellSet1D { resolution, domain, cells: Vec::new() }
    }

    /// All cells of a dyadic interval.
    pub fn from_interval(i: &DyadicInterval, resolution: u32, domain: Domain) -> Result<Self> {
        ensure!(i.n <= resolution, Domain, "interval finer than resolution");
        Self::new(resolution, domain, i.cell_range(resolution).collect())
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Exact length `count * 2^{-N}`.
    pub fn measure(&self) -> Rational {
        Rational::new(self.cells.len() as i64, 1i64 << self.resolution)
    }

    pub fn contains(&self, p: i64) -> bool {
        self.cells.binary_search(&p).is_ok()
    }

    /// Number of cells inside the dyadic interval `i`.
    pub fn count_in(&self, i: &DyadicInterval) -> usize {
        let r = i.cell_range(self.resolution);
        self.cells.partition_point(|&p| p < r.end) - self.cells.partition_point(|&p| p < r.start)
    }

    pub fn union(&self, other: &CellSet1D) -> CellSet1D {
        let mut cells: Vec<i64> = self.cells.iter().chain(&other.cells).copied().collect();
        cells.sort_unstable();
        cells.dedup();
        CellSet1D { resolution: self.resolution, domain: self.domain, cells }
    }

    pub fn difference(&self, other: &CellSet1D) -> CellSet1D {
        CellSet1D {
            resolution: self.resolution,
            domain: self.domain,
            cells: self.cells.iter().copied().filter(|&p| !other.contains(p)).collect(),
        }
    }

    pub fn is_subset(&self, other: &CellSet1D) -> bool {
        self.cells.iter().all(|&p| other.contains(p))
    }

    /// Scale-`n` dyadic intervals meeting the set, sorted.
    pub fn intervals_meeting(&self, n: u32) -> Vec<DyadicInterval> {
        let mut out: Vec<DyadicInterval> = self
            .cells
            .iter()
            .map(|&p| DyadicInterval::containing(self.resolution, p, n))
            .collect();
        out.dedup();
        out
    }
}

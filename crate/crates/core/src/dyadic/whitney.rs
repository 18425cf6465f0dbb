//! Whitney relation on dyadic intervals.
//!
//! Two intervals of the same scale are related when they are distinct and
//! non-adjacent but their parents coincide or touch. For a fixed pair of
//! distinct points this happens at exactly one scale, so the relation
//! partitions the off-diagonal of `[0,1]^2` (resp. `[-1,1]^2`).

use super::{CellSet, DyadicInterval, Tile};
use crate::error::{ensure, Result};

pub fn whitney_related(a: &DyadicInterval, b: &DyadicInterval) -> Result<bool> {
    ensure!(a.n == b.n, Input, "whitney_related needs equal scales, got {} and {}", a.n, b.n);
    Ok(related_same_scale(a, b))
}

fn related_same_scale(a: &DyadicInterval, b: &DyadicInterval) -> bool {
    if a.n == 0 || (a.m - b.m).abs() <= 1 {
        return false;
    }
    let (pa, pb) = (a.m.div_euclid(2), b.m.div_euclid(2));
    (pa - pb).abs() <= 1
}

/// Intervals related to `a`, in increasing order.
pub(crate) fn related_intervals(a: &DyadicInterval) -> impl Iterator<Item = DyadicInterval> + '_ {
    let parent = a.m.div_euclid(2);
    (2 * (parent - 1)..2 * (parent + 2))
        .map(move |m| DyadicInterval { n: a.n, m })
        .filter(move |b| related_same_scale(a, b))
}

/// The scale at which cells `p != p'` of resolution `res` fall into related
/// intervals, or `None` for equal or adjacent cells.
pub fn related_scale(res: u32, p: i64, p2: i64) -> Option<u32> {
    (1..=res).find(|&n| {
        related_same_scale(
            &DyadicInterval::containing(res, p, n),
            &DyadicInterval::containing(res, p2, n),
        )
    })
}

/// Pairs of `D_{j,k}` tiles meeting `a` whose sides are related on both
/// axes. Each unordered pair appears once, as `(first, second)` with
/// `first < second`; the list is sorted.
pub fn whitney_pairs(a: &CellSet, j: u32, k: u32) -> Vec<(Tile, Tile)> {
    let tiles = a.tiles_meeting(j, k);
    let mut out = Vec::new();
    for t in &tiles {
        for h in related_intervals(&t.h) {
            for v in related_intervals(&t.v) {
                let u = Tile { h, v };
                if *t < u && tiles.binary_search(&u).is_ok() {
                    out.push((*t, u));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Domain;

    fn iv(n: u32, m: i64) -> DyadicInterval {
        DyadicInterval { n, m }
    }

    #[test]
    fn relation_examples() {
        assert!(whitney_related(&iv(2, 0), &iv(2, 2)).unwrap());
        assert!(!whitney_related(&iv(2, 0), &iv(2, 1)).unwrap());
        assert!(!whitney_related(&iv(3, 0), &iv(3, 7)).unwrap());
        assert!(!whitney_related(&iv(2, 0), &iv(2, 0)).unwrap());
        assert!(whitney_related(&iv(2, 0), &iv(3, 4)).is_err());
        // children of adjacent negative and positive parents
        assert!(whitney_related(&iv(2, -2), &iv(2, 0)).unwrap());
    }

    /// Scans every scale with the definition spelled out on endpoints.
    fn oracle_scales(res: u32, p: i64, p2: i64) -> Vec<u32> {
        let mut out = vec![];
        for n in 1..=res {
            let len = 1i64 << (res - n);
            let (a, b) = (p.div_euclid(len), p2.div_euclid(len));
            let gap = (a - b).abs() > 1;
            let (pa, pb) = (a.div_euclid(2), b.div_euclid(2));
            if gap && (pa - pb).abs() <= 1 {
                out.push(n);
            }
        }
        out
    }

    #[test]
    fn partition_exhaustive() {
        for res in 1..=6u32 {
            for domain in [Domain::Unit, Domain::Signed] {
                let (lo, hi) = domain.index_range(res);
                for p in lo..hi {
                    for p2 in lo..hi {
                        let scales = oracle_scales(res, p, p2);
                        if (p - p2).abs() <= 1 {
                            assert!(scales.is_empty());
                            assert_eq!(related_scale(res, p, p2), None);
                        } else {
                            assert_eq!(scales.len(), 1, "res {res} cells {p} {p2}");
                            assert_eq!(related_scale(res, p, p2), Some(scales[0]));
                        }
                    }
                }
            }
        }
    }

    fn brute_pairs(a: &CellSet, j: u32, k: u32) -> Vec<(Tile, Tile)> {
        let tiles = a.tiles_meeting(j, k);
        let mut out = vec![];
        for x in &tiles {
            for y in &tiles {
                if x < y && whitney_related(&x.h, &y.h).unwrap() && whitney_related(&x.v, &y.v).unwrap() {
                    out.push((*x, *y));
                }
            }
        }
        out
    }

    #[test]
    fn pairs_match_brute_force() {
        let full = CellSet::full(4, Domain::Unit).unwrap();
        // a single related pair per axis needs scale >= 2 in the unit square
        assert!(whitney_pairs(&full, 1, 1).is_empty());
        assert_eq!(whitney_pairs(&full, 1, 1), brute_pairs(&full, 1, 1));
        for j in 0..=4 {
            for k in 0..=4 {
                assert_eq!(whitney_pairs(&full, j, k), brute_pairs(&full, j, k));
            }
        }
        let signed = CellSet::full(3, Domain::Signed).unwrap();
        assert_eq!(whitney_pairs(&signed, 1, 1), brute_pairs(&signed, 1, 1));
        assert_eq!(whitney_pairs(&signed, 1, 1).len(), 18);
        assert_eq!(whitney_pairs(&full, 2, 2).len(), 18);
    }

    #[test]
    fn single_tile_and_far_cells() {
        let t = Tile::from_indices(2, 1, 2, 1).unwrap();
        let one = CellSet::from_tile(&t, 4, Domain::Unit).unwrap();
        assert!(whitney_pairs(&one, 2, 2).is_empty());
        let two = CellSet::new(4, Domain::Unit, vec![(0, 0), (5, 9)]).unwrap();
        let (sj, sk) = (related_scale(4, 0, 5).unwrap(), related_scale(4, 0, 9).unwrap());
        let mut hits = 0;
        for j in 0..=4 {
            for k in 0..=4 {
                let pairs = whitney_pairs(&two, j, k);
                assert_eq!(pairs, brute_pairs(&two, j, k));
                if (j, k) == (sj, sk) {
                    assert_eq!(pairs.len(), 1);
                }
                hits += pairs.len();
            }
        }
        assert_eq!(hits, 1);
    }
}

//! Seeded families of test sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{CellSet, Domain, Tile};
use crate::error::{ensure, Result};

/// Set families used by sweeps and suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// Each cell kept independently with a density drawn per set.
    RandomCells,
    /// Union of a few random tiles of random shapes.
    RandomTileUnions,
    /// Product of two quaternary Cantor sets (keep quarters 0 and 2).
    Cantor,
    /// Diagonal run of equal square tiles.
    Staircase,
    /// The unit square at index 0, then one random tile per set.
    SingleTile,
    /// Cycles through the first four families.
    Mixed,
}

impl std::str::FromStr for Generator {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| crate::Error::Input(format!("unknown generator {s:?}")))
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_tile(rng: &mut impl Rng, res: u32, min_scale: u32) -> Tile {
    let j = rng.gen_range(min_scale..=res);
    let k = rng.gen_range(min_scale..=res);
    Tile::from_indices(j, rng.gen_range(0..1i64 << j), k, rng.gen_range(0..1i64 << k)).unwrap()
}

/// Dyadic Cantor set with `generations` levels at resolution `res`.
pub fn cantor_1d(generations: u32, res: u32) -> Vec<i64> {
    assert!(2 * generations <= res);
    let mut cells = vec![0i64];
    for _ in 0..generations {
        cells = cells.iter().flat_map(|&c| [4 * c, 4 * c + 2]).collect();
    }
    let shift = res - 2 * generations;
    cells.iter().flat_map(|&c| (c << shift)..((c + 1) << shift)).collect()
}

pub fn cantor(generations: u32, res: u32) -> Result<CellSet> {
    ensure!(2 * generations <= res, Domain, "cantor set of {generations} generations needs resolution >= {}", 2 * generations);
    let c = cantor_1d(generations, res);
    CellSet::new(res, Domain::Unit, c.iter().flat_map(|&p| c.iter().map(move |&q| (p, q))).collect())
}

/// `count` square tiles of side `2^{-n}` along the diagonal.
pub fn staircase(count: i64, n: u32, res: u32) -> Result<CellSet> {
    ensure!(count <= 1 << n, Domain, "staircase of {count} tiles does not fit at scale {n}");
    let tiles: Vec<Tile> = (0..count).map(|i| Tile::from_indices(n, i, n, i)).collect::<Result<_>>()?;
    CellSet::from_tiles(&tiles, res, Domain::Unit)
}

/// The `index`-th set of a seeded family; sets never come out empty.
pub fn generate(gen: Generator, res: u32, seed: u64, index: u64) -> Result<CellSet> {
    let mut r = rng(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let set = match gen {
        Generator::RandomCells => {
            let p: f64 = r.gen_range(0.02..0.6);
            let side = 1i64 << res;
            let mut cells = vec![];
            for a in 0..side {
                for b in 0..side {
                    if r.gen_bool(p) {
                        cells.push((a, b));
                    }
                }
            }
            if cells.is_empty() {
                cells.push((r.gen_range(0..side), r.gen_range(0..side)));
            }
            CellSet::new(res, Domain::Unit, cells)?
        }
        Generator::RandomTileUnions => {
            let n = r.gen_range(1..=6);
            let tiles: Vec<Tile> = (0..n).map(|_| random_tile(&mut r, res, 1)).collect();
            CellSet::from_tiles(&tiles, res, Domain::Unit)?
        }
        Generator::Cantor => cantor(r.gen_range(1..=res / 2), res)?,
        Generator::Staircase => {
            let n = r.gen_range(1..=res);
            staircase(r.gen_range(1..=1i64 << n), n, res)?
        }
        Generator::SingleTile if index == 0 => CellSet::full(res, Domain::Unit)?,
        Generator::SingleTile => CellSet::from_tile(&random_tile(&mut r, res, 0), res, Domain::Unit)?,
        Generator::Mixed => {
            const CYCLE: [Generator; 4] =
                [Generator::RandomCells, Generator::RandomTileUnions, Generator::Cantor, Generator::Staircase];
            return generate(CYCLE[(index % 4) as usize], res, seed, index);
        }
    };
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_counts() {
        assert_eq!(cantor_1d(1, 2), vec![0, 2]);
        assert_eq!(cantor_1d(2, 4), vec![0, 2, 8, 10]);
        let c = cantor(3, 6).unwrap();
        assert_eq!(c.len(), 64);
    }

    #[test]
    fn generators_are_seeded_and_nonempty() {
        for gen in [
            Generator::RandomCells,
            Generator::RandomTileUnions,
            Generator::Cantor,
            Generator::Staircase,
            Generator::SingleTile,
            Generator::Mixed,
        ] {
            for i in 0..8 {
                let a = generate(gen, 5, 42, i).unwrap();
                assert!(!a.is_empty());
                assert_eq!(a, generate(gen, 5, 42, i).unwrap());
            }
        }
        assert_ne!(
            generate(Generator::RandomCells, 5, 1, 0).unwrap(),
            generate(Generator::RandomCells, 5, 2, 0).unwrap()
        );
        assert_eq!("random-tile-unions".parse::<Generator>().unwrap(), Generator::RandomTileUnions);
        assert!("nope".parse::<Generator>().is_err());
    }
}

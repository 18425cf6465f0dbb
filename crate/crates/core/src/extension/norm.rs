//! Lebesgue norms on grids with a fixed summation tree.
//!
//! Every reduction sums each time slice pairwise and then sums the slice
//! totals pairwise. The tree depends only on the grid shape, so results are
//! bit-identical for any thread count and between the stored-field and
//! streaming entry points.

use num_complex::Complex64;

use super::density::Density;
use super::eval::{par_slices, Field, QuadratureSpec, SliceEvaluator};
use super::grid::SpacetimeGrid;
use crate::dyadic::{CellSet, ExponentPair};
use crate::error::{ensure, Result};

const BASE: usize = 64;
const PARALLEL: usize = 1 << 15;

/// Pairwise sum with leaves of at most 64 terms.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= BASE {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    if xs.len() >= PARALLEL {
        let (x, y) = rayon::join(|| pairwise_sum(a), || pairwise_sum(b));
        x + y
    } else {
        pairwise_sum(a) + pairwise_sum(b)
    }
}

fn check_p(p: f64) -> Result<()> {
    ensure!(p.is_finite() && p > 0.0, Domain, "Lebesgue exponent must be positive, got {p}");
    Ok(())
}

/// `x -> x^e` for `x >= 0`, through square roots when `8e` is an integer.
#[derive(Clone, Copy)]
enum Power {
    Eighths { whole: i32, frac: u32 },
    General(f64),
}

impl Power {
    fn new(e: f64) -> Self {
        let k = 8.0 * e;
        if k == k.round() && (0.0..=64.0).contains(&k) {
            let k = k as u32;
            Power::Eighths { whole: (k / 8) as i32, frac: k % 8 }
        } else {
            Power::General(e)
        }
    }

    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Power::General(e) => x.powf(e),
            Power::Eighths { whole, frac } => {
                let mut y = x.powi(whole);
                if frac != 0 {
                    let r2 = x.sqrt();
                    let r4 = r2.sqrt();
                    if frac & 4 != 0 {
                        y *= r2;
                    }
                    if frac & 2 != 0 {
                        y *= r4;
                    }
                    if frac & 1 != 0 {
                        y *= r4.sqrt();
                    }
                }
                y
            }
        }
    }
}

/// `sum |prod_i z_i|^p` over one slice of several fields.
fn slice_power_sum(slices: &[&[Complex64]], p: f64) -> Result<f64> {
    let n = slices[0].len();
    let pow = Power::new(0.5 * p);
    let mut terms = Vec::with_capacity(n);
    for k in 0..n {
        let mut z = slices[0][k];
        for s in &slices[1..] {
            z *= s[k];
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(crate::Error::Numeric("non-finite field sample".into()));
        }
        terms.push(pow.apply(z.norm_sqr()));
    }
    Ok(pairwise_sum(&terms))
}

fn finish(slice_sums: Vec<Result<f64>>, grid: &SpacetimeGrid, p: f64) -> Result<f64> {
    let sums = slice_sums.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((pairwise_sum(&sums) * grid.cell_volume()).powf(1.0 / p))
}

/// `(sum |F|^p h_t h_x1 h_x2)^{1/p}`; `p < 1` gives the quasi-norm.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    product_lp_norm(&[f], p)
}

/// `|| prod_i F_i ||_p` for fields on a common grid.
pub fn product_lp_norm(fields: &[&Field], p: f64) -> Result<f64> {
    check_p(p)?;
    ensure!(!fields.is_empty(), Input, "no fields");
    let grid = fields[0].grid;
    ensure!(fields.iter().all(|f| f.grid == grid), Input, "fields live on different grids");
    let sums = par_slices(grid.m[0], |it| {
        let slices: Vec<&[Complex64]> = fields.iter().map(|f| f.slice(it)).collect();
        slice_power_sum(&slices, p)
    });
    finish(sums, &grid, p)
}

/// `|| prod_i E f_i ||_p` without storing the fields; equal bit for bit to
/// `product_lp_norm` of the stored fields.
pub fn product_norm(fs: &[&Density], grid: &SpacetimeGrid, q: &QuadratureSpec, p: f64) -> Result<f64> {
    check_p(p)?;
    ensure!(!fs.is_empty(), Input, "no densities");
    let evs = fs.iter().map(|f| SliceEvaluator::new(f, grid, q)).collect::<Result<Vec<_>>>()?;
    let n = grid.m[1] * grid.m[2];
    let sums = par_slices(grid.m[0], |it| {
        let t = grid.point(0, it);
        let bufs: Vec<Vec<Complex64>> = evs
            .iter()
            .map(|ev| {
                let mut b = vec![Complex64::new(0.0, 0.0); n];
                ev.eval(t, &mut b);
                b
            })
            .collect();
        let slices: Vec<&[Complex64]> = bufs.iter().map(|b| b.as_slice()).collect();
        slice_power_sum(&slices, p)
    });
    finish(sums, grid, p)
}

/// `||E f||_p`.
pub fn extension_norm(f: &Density, grid: &SpacetimeGrid, q: &QuadratureSpec, p: f64) -> Result<f64> {
    product_norm(&[f], grid, q, p)
}

/// `||E f E g||_s`.
pub fn bilinear_norm(
    f: &Density,
    g: &Density,
    grid: &SpacetimeGrid,
    e: &ExponentPair,
    q: &QuadratureSpec,
) -> Result<f64> {
    product_norm(&[f, g], grid, q, e.s_f64())
}

/// `||E chi_Omega||_{2s} / |Omega|^{1/s'}`.
pub fn ratio(omega: &CellSet, e: &ExponentPair, grid: &SpacetimeGrid, q: &QuadratureSpec) -> Result<f64> {
    density_ratio(&Density::indicator(omega.clone()), e, grid, q)
}

/// The same for a (possibly rescaled) indicator density.
pub fn density_ratio(f: &Density, e: &ExponentPair, grid: &SpacetimeGrid, q: &QuadratureSpec) -> Result<f64> {
    ensure!(!f.is_empty(), Input, "ratio of an empty set");
    let norm = extension_norm(f, grid, q, e.two_s())?;
    Ok(norm / f.measure().powf(e.inv_s_dual()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{rational, Domain};
    use crate::extension::{extend, parabolic_rescale};

    fn grid() -> SpacetimeGrid {
        SpacetimeGrid::new(3.0, 4.0, 9, 12).unwrap()
    }

    #[test]
    fn constant_and_single_sample() {
        let g = grid();
        let mut f = Field::zeros(g);
        f.samples.iter_mut().for_each(|z| *z = Complex64::new(0.0, 2.0));
        for p in [1.0, 2.0, 3.5, 0.75] {
            let want = 2.0 * g.volume().powf(1.0 / p);
            assert!((lp_norm(&f, p).unwrap() - want).abs() < 1e-12 * want);
        }
        let mut one = Field::zeros(g);
        one.samples[17] = Complex64::new(3.0, 4.0);
        let want = 5.0 * g.cell_volume().powf(0.5);
        assert!((lp_norm(&one, 2.0).unwrap() - want).abs() < 1e-14);
        one.samples[3] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(lp_norm(&one, 2.0).unwrap_err().exit_code(), 4);
        assert!(lp_norm(&f, 0.0).is_err());
    }

    #[test]
    fn streaming_matches_stored() {
        let s = CellSet::new(3, Domain::Unit, vec![(0, 1), (1, 1), (4, 6), (7, 0)]).unwrap();
        let f = Density::indicator(s);
        let g2 = Density::indicator(CellSet::new(3, Domain::Unit, vec![(2, 2), (2, 3)]).unwrap());
        let q = QuadratureSpec::default();
        let (fa, fb) = (extend(&f, &grid(), &q).unwrap(), extend(&g2, &grid(), &q).unwrap());
        assert_eq!(extension_norm(&f, &grid(), &q, 3.5).unwrap(), lp_norm(&fa, 3.5).unwrap());
        assert_eq!(
            product_norm(&[&f, &g2], &grid(), &q, 1.75).unwrap(),
            product_lp_norm(&[&fa, &fb], 1.75).unwrap()
        );
    }

    #[test]
    fn discrete_plancherel_at_t_zero() {
        // slice lattice h d L = 2 pi with L = 2^N covers every frequency once
        let n = 3u32;
        let s = CellSet::new(n, Domain::Unit, vec![(0, 0), (1, 5), (3, 3), (6, 2), (7, 7)]).unwrap();
        let w: Vec<Complex64> = (0..5).map(|i| Complex64::new(i as f64 - 1.5, 0.3 * i as f64)).collect();
        let f = Density::weighted(s, w.clone()).unwrap();
        let d = (-(n as f64)).exp2();
        let l = 1usize << n;
        let g = SpacetimeGrid::fft_compatible(1.0, 2, l, d, l).unwrap();
        let fld = extend(&f, &g, &QuadratureSpec::default()).unwrap();
        // t = 0 is slice 1
        let slice_sum: f64 = fld.slice(1).iter().map(|z| z.norm_sqr()).sum();
        let area = d * d;
        let want: f64 = (l * l) as f64 * w.iter().map(|z| z.norm_sqr() * area * area).sum::<f64>();
        assert!((slice_sum - want).abs() < 1e-12 * want);
    }

    #[test]
    fn ratio_invariance_and_cauchy_schwarz() {
        let e = ExponentPair::new(rational(7, 4), rational(2, 1)).unwrap();
        let s = CellSet::new(3, Domain::Unit, vec![(0, 0), (0, 1), (5, 5), (6, 1)]).unwrap();
        let q = QuadratureSpec::default();
        let g = grid();
        let base = ratio(&s, &e, &g, &q).unwrap();
        let f = Density::indicator(s.clone());
        for (a, b) in [(0, 1), (1, 0), (1, 1), (2, 0)] {
            let r = density_ratio(&parabolic_rescale(&f, a, b).unwrap(), &e, &g.matched(a, b), &q).unwrap();
            assert!((r - base).abs() <= 1e-12 * base);
        }
        let other = Density::indicator(CellSet::new(3, Domain::Unit, vec![(2, 7)]).unwrap());
        let lhs = bilinear_norm(&f, &other, &g, &e, &q).unwrap();
        let rhs = extension_norm(&f, &g, &q, 3.5).unwrap() * extension_norm(&other, &g, &q, 3.5).unwrap();
        assert!(lhs <= rhs * (1.0 + 1e-12));
        let same = bilinear_norm(&f, &f, &g, &e, &q).unwrap();
        let sq = extension_norm(&f, &g, &q, 3.5).unwrap().powi(2);
        assert!((same - sq).abs() < 1e-12 * sq);
        assert!(ratio(&CellSet::empty(3, Domain::Unit), &e, &g, &q).is_err());
    }

    #[test]
    fn root_powers_match_powf() {
        for e in [0.25, 0.375, 0.875, 1.0, 1.6, 1.75, 2.5, 0.0] {
            let pw = Power::new(e);
            for x in [0.0, 1e-300, 3e-7, 0.5, 1.0, 2.75, 1e10] {
                let (a, b) = (pw.apply(x), f64::powf(x, e));
                assert!((a - b).abs() <= 4.0 * f64::EPSILON * b, "{x}^{e}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn sums_are_thread_independent() {
        let xs: Vec<f64> = (0..100_000).map(|i| ((i * 7919) % 1000) as f64 * 1e-3 + 1e-9 * i as f64).collect();
        let a = pairwise_sum(&xs);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| pairwise_sum(&xs));
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

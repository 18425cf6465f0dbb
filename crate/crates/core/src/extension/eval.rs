use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::{Density, Nodes};
use super::fft::FftSlice;
use super::grid::SpacetimeGrid;
use crate::error::{ensure, Result};

/// How slices are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadraturePath {
    /// Closed-form sums over `xi_2` runs, then a matrix product over columns.
    Direct,
    /// Two-dimensional FFT of the modulated density; falls back to
    /// [`QuadraturePath::Direct`] when the lattice is not compatible.
    SliceTransform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Midpoints per cell edge: 1, 2 or 4.
    pub oversample: u32,
    pub path: QuadraturePath,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { oversample: 1, path: QuadraturePath::Direct }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            matches!(self.oversample, 1 | 2 | 4),
            Domain,
            "oversample must be 1, 2 or 4, got {}",
            self.oversample
        );
        Ok(())
    }
}

/// Samples of `E f` on a grid, row-major in `(t, x1, x2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub grid: SpacetimeGrid,
    pub samples: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: SpacetimeGrid) -> Self {
        Field { grid, samples: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn index(&self, it: usize, i1: usize, i2: usize) -> usize {
        (it * self.grid.m[1] + i1) * self.grid.m[2] + i2
    }

    pub fn get(&self, it: usize, i1: usize, i2: usize) -> Complex64 {
        self.samples[self.index(it, i1, i2)]
    }

    pub fn slice(&self, it: usize) -> &[Complex64] {
        let n = self.grid.m[1] * self.grid.m[2];
        &self.samples[it * n..(it + 1) * n]
    }

    /// Pointwise product; grids must agree.
    pub fn product(&self, other: &Field) -> Result<Field> {
        ensure!(self.grid == other.grid, Input, "fields live on different grids");
        Ok(Field {
            grid: self.grid,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect(),
        })
    }
}

/// `D_n(w) = sum_{l<n} e^{i w l} e^{-i w (n-1)/2} = sin(n w/2) / sin(w/2)`,
/// reduced so that the denominator never loses precision near its zeros.
pub(crate) fn dirichlet(n: u32, omega: f64) -> f64 {
    let half = 0.5 * omega;
    let m = (half / std::f64::consts::PI).round();
    let eps = half - m * std::f64::consts::PI;
    let odd = (m as i64).rem_euclid(2) == 1 && n % 2 == 0;
    let sign = if odd { -1.0 } else { 1.0 };
    let s = eps.sin();
    if s == 0.0 {
        sign * n as f64
    } else {
        sign * (n as f64 * eps).sin() / s
    }
}

/// Evaluates `E f` one time slice at a time.
pub(crate) struct SliceEvaluator {
    grid: SpacetimeGrid,
    nodes: Nodes,
    x2: Vec<f64>,
    e_re: Vec<f64>,
    e_im: Vec<f64>,
    fft: Option<FftSlice>,
}

/// Rejects x-lattices too coarse for the finest cells.
pub fn aliasing_guard(f: &Density, grid: &SpacetimeGrid) -> Result<()> {
    let (r1, r2) = f.axis_resolution();
    for (axis, r) in [(1, r1), (2, r2)] {
        let h = grid.spacing(axis);
        let limit = std::f64::consts::PI * (r as f64).exp2();
        if h >= limit {
            return Err(crate::Error::Numeric(format!(
                "x{axis} spacing {h} >= pi 2^{r}: lattice cannot resolve the finest cells"
            )));
        }
    }
    Ok(())
}

impl SliceEvaluator {
    pub fn new(f: &Density, grid: &SpacetimeGrid, q: &QuadratureSpec) -> Result<Self> {
        q.validate()?;
        aliasing_guard(f, grid)?;
        let nodes = f.nodes(q.oversample);
        let x1 = grid.points(1);
        let c = nodes.u.len();
        let mut e_re = vec![0.0; x1.len() * c];
        let mut e_im = vec![0.0; x1.len() * c];
        for (i, &x) in x1.iter().enumerate() {
            for (k, &a) in nodes.xi1.iter().enumerate() {
                let (s, co) = (x * a).sin_cos();
                e_re[i * c + k] = co;
                e_im[i * c + k] = s;
            }
        }
        let fft = match q.path {
            QuadraturePath::SliceTransform => FftSlice::plan(&nodes, grid),
            QuadraturePath::Direct => None,
        };
        Ok(SliceEvaluator { grid: *grid, nodes, x2: grid.points(2), e_re, e_im, fft })
    }

    pub fn uses_fft(&self) -> bool {
        self.fft.is_some()
    }

    pub fn slice_len(&self) -> usize {
        self.grid.m[1] * self.grid.m[2]
    }

    /// Writes the slice at time `t` into `out` (length `M_x1 M_x2`).
    pub fn eval(&self, t: f64, out: &mut [Complex64]) {
        debug_assert_eq!(out.len(), self.slice_len());
        if self.nodes.is_empty() {
            out.fill(Complex64::new(0.0, 0.0));
            return;
        }
        match &self.fft {
            Some(fft) => fft.eval(&self.nodes, &self.grid, t, out),
            None => self.eval_direct(t, out),
        }
    }

    fn eval_direct(&self, t: f64, out: &mut [Complex64]) {
        let nd = &self.nodes;
        let (c, m1, m2) = (nd.u.len(), self.grid.m[1], self.grid.m[2]);
        let mut g_re = vec![0.0; c * m2];
        let mut g_im = vec![0.0; c * m2];
        for k in 0..c {
            let a = nd.xi1[k];
            let runs = &nd.runs[k];
            for (i2, &x2) in self.x2.iter().enumerate() {
                let omega = (t * a + x2) * nd.d2;
                let mut acc = Complex64::new(0.0, 0.0);
                for r in runs {
                    let (s, co) = (omega * (r.v0 as f64 + 0.5 * r.n as f64)).sin_cos();
                    acc += r.w * Complex64::new(co, s) * dirichlet(r.n, omega);
                }
                g_re[k * m2 + i2] = acc.re;
                g_im[k * m2 + i2] = acc.im;
            }
        }
        let mut f_re = vec![0.0; m1 * m2];
        let mut f_im = vec![0.0; m1 * m2];
        let scale = nd.d1 * nd.d2;
        // (E_re + i E_im)(G_re + i G_im), four real products
        unsafe {
            let (er, ei) = (self.e_re.as_ptr(), self.e_im.as_ptr());
            let (gr, gi) = (g_re.as_ptr(), g_im.as_ptr());
            let mm = |alpha: f64, a: *const f64, b: *const f64, beta: f64, out: *mut f64| {
                matrixmultiply::dgemm(
                    m1, c, m2, alpha, a, c as isize, 1, b, m2 as isize, 1, beta, out, m2 as isize, 1,
                )
            };
            mm(scale, er, gr, 0.0, f_re.as_mut_ptr());
            mm(-scale, ei, gi, 1.0, f_re.as_mut_ptr());
            mm(scale, er, gi, 0.0, f_im.as_mut_ptr());
            mm(scale, ei, gr, 1.0, f_im.as_mut_ptr());
        }
        for (o, (re, im)) in out.iter_mut().zip(f_re.into_iter().zip(f_im)) {
            *o = Complex64::new(re, im);
        }
    }
}

/// Applies `f` to each time index in parallel, results in time order.
pub(crate) fn par_slices<T: Send>(mt: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..mt).into_par_iter().map(f).collect()
}

/// The path `extend` takes for `f` on `grid`: a slice-transform request
/// falls back to direct summation on incompatible lattices.
pub fn effective_path(f: &Density, grid: &SpacetimeGrid, q: &QuadratureSpec) -> Result<QuadraturePath> {
    let ev = SliceEvaluator::new(f, grid, q)?;
    Ok(if ev.uses_fft() { QuadraturePath::SliceTransform } else { QuadraturePath::Direct })
}

/// Midpoint-rule samples of `E f(t, x) = int e^{i(t xi_1 xi_2 + x . xi)} f(xi) d xi`.
pub fn extend(f: &Density, grid: &SpacetimeGrid, q: &QuadratureSpec) -> Result<Field> {
    let ev = SliceEvaluator::new(f, grid, q)?;
    let mut field = Field::zeros(*grid);
    let n = ev.slice_len();
    field
        .samples
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(it, out)| ev.eval(grid.point(0, it), out));
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{CellSet, Domain};
    use crate::extension::density::parabolic_rescale;

    /// Plain triple loop over every quadrature node.
    fn naive(f: &Density, o: u32, t: f64, x1: f64, x2: f64) -> Complex64 {
        let nd = f.nodes(o);
        let mut acc = Complex64::new(0.0, 0.0);
        for (u, v, w) in nd.points() {
            let (a, b) = ((u as f64 + 0.5) * nd.d1, (v as f64 + 0.5) * nd.d2);
            acc += w * Complex64::from_polar(1.0, t * a * b + x1 * a + x2 * b);
        }
        acc * nd.d1 * nd.d2
    }

    fn rel(a: Complex64, b: Complex64, floor: f64) -> f64 {
        (a - b).norm() / b.norm().max(floor)
    }

    #[test]
    fn dirichlet_matches_sum() {
        for n in 1..9u32 {
            for k in -300..300 {
                let w = k as f64 * 0.0731;
                let sum: Complex64 = (0..n).map(|l| Complex64::from_polar(1.0, w * (l as f64 - (n - 1) as f64 / 2.0))).sum();
                assert!((sum.re - dirichlet(n, w)).abs() < 1e-12 * n as f64, "n {n} w {w}");
                assert!(sum.im.abs() < 1e-12 * n as f64);
            }
            // exact zeros of the denominator
            assert_eq!(dirichlet(n, 0.0), n as f64);
            let at_2pi = dirichlet(n, 2.0 * std::f64::consts::PI);
            assert!((at_2pi - if n % 2 == 0 { -(n as f64) } else { n as f64 }).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_and_single_cell() {
        let g = SpacetimeGrid::new(2.0, 3.0, 5, 6).unwrap();
        let q = QuadratureSpec::default();
        let empty = extend(&Density::indicator(CellSet::empty(3, Domain::Unit)), &g, &q).unwrap();
        assert!(empty.samples.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        let one = Density::indicator(CellSet::new(3, Domain::Unit, vec![(2, 5)]).unwrap());
        let f = extend(&one, &g, &q).unwrap();
        let origin = f.get(2, 3, 3);
        assert!((origin - Complex64::new(1.0 / 64.0, 0.0)).norm() < 1e-17);
    }

    #[test]
    fn matches_naive_sum() {
        let s = CellSet::new(
            3,
            Domain::Signed,
            vec![(-8, 3), (-8, 4), (-8, 6), (0, 0), (1, -2), (5, 7), (5, 6), (7, -8)],
        )
        .unwrap();
        let w: Vec<Complex64> = (0..s.len()).map(|i| Complex64::new(1.0 + i as f64, 0.5 - i as f64)).collect();
        for f in [Density::indicator(s.clone()), Density::weighted(s, w).unwrap()] {
            for o in [1, 2, 4] {
                let g = SpacetimeGrid::new(3.0, 5.0, 7, 10).unwrap();
                let q = QuadratureSpec { oversample: o, path: QuadraturePath::Direct };
                let fld = extend(&f, &g, &q).unwrap();
                for it in 0..7 {
                    for i1 in (0..10).step_by(3) {
                        for i2 in 0..10 {
                            let want = naive(&f, o, g.point(0, it), g.point(1, i1), g.point(2, i2));
                            assert!(rel(fld.get(it, i1, i2), want, f.l1_norm()) < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rescale_is_exact_on_matched_grids() {
        let s = CellSet::new(3, Domain::Unit, vec![(0, 0), (0, 1), (3, 5), (6, 2), (7, 7)]).unwrap();
        let f = Density::indicator(s);
        let g = SpacetimeGrid::new(4.0, 6.0, 9, 12).unwrap();
        let q = QuadratureSpec::default();
        let base = extend(&f, &g, &q).unwrap();
        for (a, b) in [(1, 0), (0, 2), (2, 1)] {
            let r = parabolic_rescale(&f, a, b).unwrap();
            let fld = extend(&r, &g.matched(a, b), &q).unwrap();
            let lm = (-((a + b) as f64)).exp2();
            for (x, y) in fld.samples.iter().zip(&base.samples) {
                assert_eq!(*x, *y * lm);
            }
        }
    }

    #[test]
    fn guard_rejects_coarse_lattice() {
        let f = Density::indicator(CellSet::full(1, Domain::Unit).unwrap());
        let g = SpacetimeGrid::new(1.0, 100.0, 3, 4).unwrap();
        let err = extend(&f, &g, &QuadratureSpec::default()).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(QuadratureSpec { oversample: 3, path: QuadraturePath::Direct }.validate().is_err());
    }
}

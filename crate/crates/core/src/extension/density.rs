use num_complex::Complex64;

use crate::dyadic::{CellSet, Rational, N_MAX};
use crate::error::{ensure, Result};

/// A function `f` on frequency space: weights on the cells of a set, read
/// through the anisotropic scaling `(xi_1, xi_2) -> (2^{-a} xi_1, 2^{-b} xi_2)`.
///
/// Keeping the scaling symbolic lets a parabolic rescale reuse the same
/// quadrature nodes up to exact powers of two.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    cells: CellSet,
    weights: Option<Vec<Complex64>>,
    scale: (u32, u32),
}

/// Run of consecutive `xi_2` nodes with a common weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Run {
    pub v0: i64,
    pub n: u32,
    pub w: Complex64,
}

/// Midpoint quadrature nodes `((u + 1/2) d1, (v + 1/2) d2)` grouped by column.
#[derive(Clone, Debug)]
pub(crate) struct Nodes {
    pub d1: f64,
    pub d2: f64,
    pub u: Vec<i64>,
    pub xi1: Vec<f64>,
    pub runs: Vec<Vec<Run>>,
}

impl Nodes {
    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Every node with its weight, for oracles and small transforms.
    pub fn points(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        self.u.iter().zip(&self.runs).flat_map(|(&u, runs)| {
            runs.iter().flat_map(move |r| (0..r.n as i64).map(move |l| (u, r.v0 + l, r.w)))
        })
    }
}

impl Density {
    /// The characteristic function of a set.
    pub fn indicator(cells: CellSet) -> Self {
        Density { cells, weights: None, scale: (0, 0) }
    }

    pub fn weighted(cells: CellSet, weights: Vec<Complex64>) -> Result<Self> {
        ensure!(
            weights.len() == cells.len(),
            Input,
            "{} weights for {} cells",
            weights.len(),
            cells.len()
        );
        ensure!(weights.iter().all(|w| w.re.is_finite() && w.im.is_finite()), Input, "non-finite weight");
        Ok(Density { cells, weights: Some(weights), scale: (0, 0) })
    }

    /// Cells before scaling.
    pub fn cells(&self) -> &CellSet {
        &self.cells
    }

    pub fn weights(&self) -> Option<&[Complex64]> {
        self.weights.as_deref()
    }

    pub fn scale(&self) -> (u32, u32) {
        self.scale
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_indicator(&self) -> bool {
        self.weights.is_none()
    }

    /// Resolution of the finest cell edge on each axis, `N + a` and `N + b`.
    pub fn axis_resolution(&self) -> (u32, u32) {
        let n = self.cells.resolution();
        (n + self.scale.0, n + self.scale.1)
    }

    /// Support as a cell set at resolution `N + max(a, b)`.
    pub fn support(&self) -> Result<CellSet> {
        let (a, b) = self.scale;
        let top = a.max(b);
        let n = self.cells.resolution() + top;
        ensure!(n <= N_MAX, Domain, "rescaled support needs resolution {n} > N_max = {N_MAX}");
        let (sa, sb) = (1i64 << (top - a), 1i64 << (top - b));
        let mut cells = Vec::with_capacity(self.cells.len() * (sa * sb) as usize);
        for &(p, q) in self.cells.cells() {
            for i in 0..sa {
                for k in 0..sb {
                    cells.push((p * sa + i, q * sb + k));
                }
            }
        }
        CellSet::new(n, self.cells.domain(), cells)
    }

    fn cell_area(&self) -> f64 {
        let (r1, r2) = self.axis_resolution();
        (-((r1 + r2) as f64)).exp2()
    }

    pub fn measure(&self) -> f64 {
        self.cells.len() as f64 * self.cell_area()
    }

    pub fn measure_exact(&self) -> Rational {
        let (r1, r2) = self.axis_resolution();
        Rational::new(self.cells.len() as i64, 1i64 << (r1 + r2))
    }

    fn weight_iter(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.cells.len()).map(|i| self.weights.as_ref().map_or(Complex64::new(1.0, 0.0), |w| w[i]))
    }

    /// `||f||_r = (sum |w|^r area)^{1/r}`.
    pub fn lr_norm(&self, r: f64) -> f64 {
        let sum: f64 = self.weight_iter().map(|w| w.norm().powf(r)).sum();
        (sum * self.cell_area()).powf(1.0 / r)
    }

    pub fn l1_norm(&self) -> f64 {
        self.lr_norm(1.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lr_norm(2.0)
    }

    pub(crate) fn nodes(&self, oversample: u32) -> Nodes {
        let o = oversample as i64;
        let (r1, r2) = self.axis_resolution();
        let d1 = (-(r1 as f64)).exp2() / oversample as f64;
        let d2 = (-(r2 as f64)).exp2() / oversample as f64;
        let mut nodes = Nodes { d1, d2, u: vec![], xi1: vec![], runs: vec![] };
        let mut idx = 0;
        for (p, column) in self.cells.columns() {
            let mut runs: Vec<Run> = vec![];
            for &(_, q) in column {
                let w = self.weights.as_ref().map_or(Complex64::new(1.0, 0.0), |w| w[idx]);
                idx += 1;
                match runs.last_mut() {
                    Some(r) if r.v0 + r.n as i64 == q * o && r.w == w => r.n += oversample,
                    _ => runs.push(Run { v0: q * o, n: oversample, w }),
                }
            }
            for s in 0..o {
                let u = p * o + s;
                nodes.u.push(u);
                nodes.xi1.push((u as f64 + 0.5) * d1);
                nodes.runs.push(runs.clone());
            }
        }
        nodes
    }
}

/// The same function seen through `(xi_1, xi_2) -> (2^{-a} xi_1, 2^{-b} xi_2)`,
/// weights unchanged.
pub fn parabolic_rescale(f: &Density, a: u32, b: u32) -> Result<Density> {
    let scale = (f.scale.0 + a, f.scale.1 + b);
    let n = f.cells.resolution() + scale.0.max(scale.1);
    ensure!(n <= N_MAX, Domain, "rescale needs resolution {n} > N_max = {N_MAX}");
    Ok(Density { cells: f.cells.clone(), weights: f.weights.clone(), scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{Domain, Tile};

    #[test]
    fn rescaled_support() {
        let sq = Density::indicator(CellSet::full(2, Domain::Unit).unwrap());
        let r = parabolic_rescale(&sq, 1, 0).unwrap();
        let expect = CellSet::from_tile(&Tile::from_indices(1, 0, 0, 0).unwrap(), 3, Domain::Unit).unwrap();
        assert_eq!(r.support().unwrap(), expect);
        assert_eq!(r.measure(), 0.5);
        assert_eq!(parabolic_rescale(&sq, 0, 0).unwrap(), sq);
        assert!(parabolic_rescale(&sq, 15, 0).is_err());
    }

    #[test]
    fn nodes_merge_runs() {
        let s = CellSet::new(3, Domain::Unit, vec![(0, 0), (0, 1), (0, 3), (2, 5)]).unwrap();
        let f = Density::indicator(s);
        let nd = f.nodes(1);
        assert_eq!(nd.u, vec![0, 2]);
        assert_eq!(nd.runs[0].len(), 2);
        assert_eq!(nd.runs[0][0].n, 2);
        assert_eq!(nd.points().count(), 4);
        let nd2 = f.nodes(2);
        assert_eq!(nd2.u, vec![0, 1, 4, 5]);
        assert_eq!(nd2.points().count(), 16);
        assert_eq!(nd2.xi1[1], 1.5 / 16.0);
    }

    #[test]
    fn norms() {
        let s = CellSet::full(2, Domain::Unit).unwrap();
        let f = Density::weighted(s.clone(), vec![Complex64::new(2.0, 0.0); 16]).unwrap();
        assert!((f.l2_norm() - 2.0).abs() < 1e-15);
        assert!(Density::weighted(s, vec![]).is_err());
    }
}

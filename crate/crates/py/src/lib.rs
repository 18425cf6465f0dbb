//! Python bindings: cell sets, grids, the ratio and the experiment commands.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hypext::decomposition::{choose_j, fiber_slice, tile_cover_with, StructureConfig};
use hypext::dyadic::{self, Domain, ExponentPair, Rational, Tile};
use hypext::extension::{self, Density, QuadratureSpec};

fn err(e: hypext::Error) -> PyErr {
    match e {
        hypext::Error::Domain(_) | hypext::Error::Input(_) | hypext::Error::Json(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn rational(text: &str) -> PyResult<Rational> {
    text.trim().parse().map_err(|_| PyValueError::new_err(format!("not a rational: {text:?}")))
}

fn exponents(s: &str, r: &str) -> PyResult<ExponentPair> {
    ExponentPair::new(rational(s)?, rational(r)?).map_err(err)
}

/// A finite union of dyadic cells of side `2^-resolution`.
#[pyclass(name = "CellSet", frozen, from_py_object)]
#[derive(Clone)]
struct PyCellSet(dyadic::CellSet);

#[pymethods]
impl PyCellSet {
    #[new]
    #[pyo3(signature = (resolution, cells, signed = false))]
    fn new(resolution: u32, cells: Vec<(i64, i64)>, signed: bool) -> PyResult<Self> {
        let domain = if signed { Domain::Signed } else { Domain::Unit };
        dyadic::CellSet::new(resolution, domain, cells).map(PyCellSet).map_err(err)
    }

    /// The tile `[jm 2^-j, (jm+1) 2^-j] x [km 2^-k, (km+1) 2^-k]`.
    #[staticmethod]
    fn tile(j: u32, jm: i64, k: u32, km: i64, resolution: u32) -> PyResult<Self> {
        let t = Tile::from_indices(j, jm, k, km).map_err(err)?;
        dyadic::CellSet::from_tile(&t, resolution, Domain::Unit).map(PyCellSet).map_err(err)
    }

    #[staticmethod]
    fn full(resolution: u32) -> PyResult<Self> {
        dyadic::CellSet::full(resolution, Domain::Unit).map(PyCellSet).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        dyadic::CellSet::from_json(text).map(PyCellSet).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn resolution(&self) -> u32 {
        self.0.resolution()
    }

    #[getter]
    fn cells(&self) -> Vec<(i64, i64)> {
        self.0.cells().to_vec()
    }

    /// Exact measure as `(numerator, denominator)`.
    #[getter]
    fn measure(&self) -> (i64, i64) {
        let m = self.0.measure();
        (*m.numer(), *m.denom())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("CellSet(resolution={}, cells={}, measure={})", self.0.resolution(), self.0.len(), self.0.measure())
    }
}

/// The sampling box `[-Rt, Rt] x [-Rx, Rx]^2` with `Mt x Mx x Mx` points.
#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone)]
struct PyGrid(extension::SpacetimeGrid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(rt: f64, rx: f64, mt: usize, mx: usize) -> PyResult<Self> {
        extension::SpacetimeGrid::new(rt, rx, mt, mx).map(PyGrid).map_err(err)
    }

    #[staticmethod]
    fn reference() -> Self {
        PyGrid(extension::SpacetimeGrid::reference())
    }

    fn matched(&self, a: u32, b: u32) -> Self {
        PyGrid(self.0.matched(a, b))
    }

    fn refined(&self, factor: usize) -> Self {
        PyGrid(self.0.refined(factor))
    }

    #[getter]
    fn half_widths(&self) -> [f64; 3] {
        self.0.r
    }

    #[getter]
    fn samples(&self) -> [usize; 3] {
        self.0.m
    }

    fn __repr__(&self) -> String {
        format!("Grid({})", self.0)
    }
}

fn quad(oversample: u32) -> QuadratureSpec {
    QuadratureSpec { oversample, ..Default::default() }
}

/// `||E chi||_{2s} / |set|^{1/s'}`.
#[pyfunction]
#[pyo3(signature = (set, grid, s = "7/4", r = "2", oversample = 1))]
fn ratio(py: Python<'_>, set: &PyCellSet, grid: &PyGrid, s: &str, r: &str, oversample: u32) -> PyResult<f64> {
    let e = exponents(s, r)?;
    let (c, g) = (set.0.clone(), grid.0);
    py.detach(move || extension::ratio(&c, &e, &g, &quad(oversample))).map_err(err)
}

/// `||E chi||_p` on the grid.
#[pyfunction]
#[pyo3(signature = (set, grid, p, oversample = 1))]
fn extension_norm(py: Python<'_>, set: &PyCellSet, grid: &PyGrid, p: f64, oversample: u32) -> PyResult<f64> {
    let (f, g) = (Density::indicator(set.0.clone()), grid.0);
    py.detach(move || extension::extension_norm(&f, &g, &quad(oversample), p)).map_err(err)
}

/// Samples of `E chi` as `(shape, real parts, imaginary parts)`, row-major
/// in `(t, x1, x2)`.
#[pyfunction]
#[pyo3(signature = (set, grid, oversample = 1))]
#[allow(clippy::type_complexity)]
fn extend(py: Python<'_>, set: &PyCellSet, grid: &PyGrid, oversample: u32) -> PyResult<([usize; 3], Vec<f64>, Vec<f64>)> {
    let (f, g) = (Density::indicator(set.0.clone()), grid.0);
    let field = py.detach(move || extension::extend(&f, &g, &quad(oversample))).map_err(err)?;
    let re = field.samples.iter().map(|z| z.re).collect();
    let im = field.samples.iter().map(|z| z.im).collect();
    Ok((field.grid.m, re, im))
}

/// `(K, J, cover JSON)` for every fiber part of the set.
#[pyfunction]
fn decompose(set: &PyCellSet) -> PyResult<Vec<(u32, u32, String)>> {
    let cfg = StructureConfig::default();
    let fd = fiber_slice(&set.0).map_err(err)?;
    let mut out = vec![];
    for (&k, part) in &fd.parts {
        let j = choose_j(part).map_err(err)?;
        let cover = tile_cover_with(part, j, k, &cfg).map_err(err)?;
        out.push((k, j, cover.to_json()));
    }
    Ok(out)
}

/// Runs a command line subcommand with a JSON configuration (missing
/// fields take their defaults); returns the report as JSON. Files go to
/// `out`.
#[pyfunction]
#[pyo3(signature = (command, out, config = "{}"))]
fn run_command(py: Python<'_>, command: &str, out: &str, config: &str) -> PyResult<String> {
    let cmd: hypext::cli::Command = command.parse().map_err(err)?;
    let mut cfg: hypext::cli::RunConfig = serde_json::from_str(config).map_err(|e| err(e.into()))?;
    cfg.out = PathBuf::from(out);
    cfg.validate().map_err(err)?;
    let outcome = py.detach(move || hypext::cli::run_with(cmd, cfg)).map_err(err)?;
    serde_json::to_string(&outcome.report).map_err(|e| err(e.into()))
}

#[pymodule]
fn pyhypext(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCellSet>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(ratio, m)?)?;
    m.add_function(wrap_pyfunction!(extension_norm, m)?)?;
    m.add_function(wrap_pyfunction!(extend, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    Ok(())
}

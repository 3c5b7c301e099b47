//! Python bindings for the `dirac_orbits` core crate.
//!
//! Reports come back as plain dicts (serialized through JSON), matrices as
//! nested lists of complex numbers.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use dirac_orbits::chern::{self, ChernOptions};
use dirac_orbits::dirac;
use dirac_orbits::discseries::{self as ds, SmearedTest};
use dirac_orbits::repbuild::{self, CompactAlgebra};
use dirac_orbits::rootsys::{self, GroupLabel};
use dirac_orbits::CMat;

fn py_err(e: dirac_orbits::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn rows(m: &CMat) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn label(group: &str) -> PyResult<GroupLabel> {
    group.parse().map_err(py_err)
}

#[pyclass(name = "RootDatum", module = "dirac_orbits")]
struct PyRootDatum {
    inner: rootsys::RootDatum,
}

#[pymethods]
impl PyRootDatum {
    #[new]
    fn new(group: &str) -> PyResult<Self> {
        Ok(PyRootDatum { inner: rootsys::build_root_datum(label(group)?) })
    }

    #[getter]
    fn label(&self) -> &'static str {
        self.inner.label.name()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    #[getter]
    fn weyl_order(&self) -> usize {
        self.inner.weyl_order()
    }

    /// Weyl dimension of the irrep with the given Dynkin labels.
    fn weyl_dim(&self, dynkin: Vec<i64>) -> PyResult<u64> {
        let w = self.inner.from_dynkin(&dynkin).map_err(py_err)?;
        self.inner.weyl_dim(&w).map_err(py_err)
    }

    fn weyl_character(&self, dynkin: Vec<i64>, x: Vec<f64>) -> PyResult<Complex64> {
        let w = self.inner.from_dynkin(&dynkin).map_err(py_err)?;
        self.inner.weyl_character(&w, &x).map_err(py_err)
    }

    fn a_hat(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.a_hat(&x).map_err(py_err)
    }

    /// Freudenthal multiplicities as {weight string: multiplicity}.
    fn multiplicities<'py>(&self, py: Python<'py>, dynkin: Vec<i64>) -> PyResult<Bound<'py, PyAny>> {
        let w = self.inner.from_dynkin(&dynkin).map_err(py_err)?;
        let m = repbuild::freudenthal(&w, &self.inner).map_err(py_err)?;
        let flat: std::collections::BTreeMap<String, u64> = m.iter().map(|(k, v)| (k.to_strings().join(" "), *v)).collect();
        to_py(py, &flat)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &rootsys::RootDatumJson::from(&self.inner))
    }
}

#[pyclass(name = "Irrep", module = "dirac_orbits")]
struct PyIrrep {
    alg: CompactAlgebra,
    inner: repbuild::Irrep,
}

#[pymethods]
impl PyIrrep {
    #[new]
    fn new(group: &str, dynkin: Vec<i64>) -> PyResult<Self> {
        let alg = CompactAlgebra::new(label(group)?).map_err(py_err)?;
        let w = alg.datum.from_dynkin(&dynkin).map_err(py_err)?;
        let inner = alg.irrep(&w).map_err(py_err)?;
        Ok(PyIrrep { alg, inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn weights(&self) -> Vec<Vec<String>> {
        self.inner.weights.iter().map(|w| w.to_strings()).collect()
    }

    fn generators(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.inner.generators.iter().map(rows).collect()
    }

    fn trace_exp(&self, x: Vec<f64>) -> Complex64 {
        self.inner.trace_exp(&x)
    }

    fn commutator_residual(&self) -> f64 {
        self.inner.commutator_residual(&self.alg.algebra)
    }
}

#[pyclass(name = "CompactDirac", module = "dirac_orbits")]
struct PyCompactDirac {
    inner: dirac::CompactDirac,
}

#[pymethods]
impl PyCompactDirac {
    #[new]
    fn new(group: &str, dynkin: Vec<i64>) -> PyResult<Self> {
        let alg = CompactAlgebra::new(label(group)?).map_err(py_err)?;
        let w = alg.datum.from_dynkin(&dynkin).map_err(py_err)?;
        Ok(PyCompactDirac { inner: dirac::CompactDirac::new(alg, &w).map_err(py_err)? })
    }

    #[getter]
    fn total_dim(&self) -> usize {
        self.inner.family.total_dim
    }

    #[getter]
    fn lambda_rho_sq(&self) -> f64 {
        self.inner.lambda_rho_sq()
    }

    fn orbit_point(&self) -> Vec<f64> {
        self.inner.orbit_point()
    }

    fn scalar_square_residual(&self) -> f64 {
        self.inner.scalar_square_residual()
    }

    fn dirac_at(&self, mu: Vec<f64>) -> Vec<Vec<Complex64>> {
        rows(&self.inner.family.dirac_at(&mu))
    }

    /// Eigenvalues of D_μ², ascending.
    fn spectrum(&self, mu: Vec<f64>) -> Vec<f64> {
        self.inner.family.spectrum(&mu)
    }

    /// (min |spec D_μ²|, kernel dimension).
    fn gap_and_kernel(&self, mu: Vec<f64>) -> (f64, usize) {
        self.inner.family.gap_and_kernel(&mu)
    }

    fn check_commutators<'py>(&self, py: Python<'py>, mu: Vec<f64>, xi: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.family.check_commutators(&mu, &xi))
    }

    fn kernel_locus_scan<'py>(&self, py: Python<'py>, ray: Vec<f64>, radii: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.family.kernel_locus_scan(&ray, &radii))
    }

    #[pyo3(signature = (eps, t, x, nodes = 40))]
    fn chern_integral<'py>(&self, py: Python<'py>, eps: f64, t: f64, x: Vec<f64>, nodes: usize) -> PyResult<Bound<'py, PyAny>> {
        let opts = ChernOptions { nodes, ..ChernOptions::default() };
        let r = py.detach(|| chern::chern_integral(&self.inner.family, eps, t, &x, &opts)).map_err(py_err)?;
        to_py(py, &r)
    }

    /// Orbital integral over the orbit through λ+ρ.
    #[pyo3(signature = (x, nodes = 48))]
    fn orbital_integral<'py>(&self, py: Python<'py>, x: Vec<f64>, nodes: usize) -> PyResult<Bound<'py, PyAny>> {
        let d = &self.inner.alg.datum;
        let nu = self.inner.lambda() + &d.rho();
        to_py(py, &chern::orbital_integral(&self.inner.alg, &nu, &x, nodes).map_err(py_err)?)
    }
}

#[pyclass(name = "DSModel", module = "dirac_orbits")]
struct PyDSModel {
    inner: ds::DSModel,
}

#[pymethods]
impl PyDSModel {
    #[new]
    #[pyo3(signature = (big_lambda, n = 64))]
    fn new(big_lambda: u32, n: usize) -> PyResult<Self> {
        Ok(PyDSModel { inner: ds::DSModel::build(big_lambda, n).map_err(py_err)? })
    }

    #[getter]
    fn window(&self) -> usize {
        self.inner.window()
    }

    #[getter]
    fn lambda_rho_sq(&self) -> f64 {
        self.inner.lambda_rho_sq()
    }

    fn orbit_point(&self) -> [f64; 3] {
        self.inner.orbit_point()
    }

    fn casimir_residual(&self) -> f64 {
        self.inner.casimir_residual()
    }

    fn ds_spectrum<'py>(&self, py: Python<'py>, mu: [f64; 3]) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.ds_spectrum(&mu).map_err(py_err)?)
    }

    fn spectral_case<'py>(&self, py: Python<'py>, mu: [f64; 3]) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ds::spectral_case_analysis(&self.inner, &mu).map_err(py_err)?)
    }

    fn kernel_gap_scan<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = py.detach(|| ds::kernel_gap_scan(&self.inner)).map_err(py_err)?;
        to_py(py, &r)
    }

    fn ktype_bound_check<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ds::ktype_bound_check(&self.inner))
    }
}

/// Smeared Rossman check with N and 2N truncations and R, 2R hyperboloid cutoffs.
#[pyfunction]
#[pyo3(signature = (big_lambda, width, n = 64))]
fn rossman_check<'py>(py: Python<'py>, big_lambda: u32, width: f64, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| ds::rossman_check(big_lambda, n, &SmearedTest::gaussian(width))).map_err(py_err)?;
    to_py(py, &r)
}

/// Run the command-line front end in-process; returns the exit code.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    dirac_orbits::cli::run(std::iter::once("dirac-orbits".to_string()).chain(args))
}

#[pymodule]
#[pyo3(name = "dirac_orbits")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRootDatum>()?;
    m.add_class::<PyIrrep>()?;
    m.add_class::<PyCompactDirac>()?;
    m.add_class::<PyDSModel>()?;
    m.add_function(wrap_pyfunction!(rossman_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("SCHEMA_VERSION", dirac_orbits::cli::SCHEMA_VERSION)?;
    Ok(())
}

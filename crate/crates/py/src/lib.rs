//! Python bindings. Structured results are returned as plain dicts built
//! from the same JSON the command-line tool prints.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Serialize;
use solidtorus::checker::full_verdict;
use solidtorus::cli::realization_json;
use solidtorus::feasibility::{find_positive_solution, FeasibilityOptions};
use solidtorus::realize::{realize as realize_rs, RealizeOptions};
use solidtorus::system::{kernel_basis, verify_nz};
use solidtorus::{generate, lobachevsky as lob, volume as vol};
use solidtorus::{AngleAssignment, RawInstance, Triangulation};

create_exception!(solidtorus, SolidTorusError, PyException);

fn err(e: solidtorus::Error) -> PyErr {
    SolidTorusError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| SolidTorusError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Triangulated boundary torus with a chosen meridian.
#[pyclass(name = "Triangulation", frozen)]
struct PyTriangulation {
    inner: Triangulation,
}

#[pymethods]
impl PyTriangulation {
    /// Reads the triangulation part of an instance JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let raw = RawInstance::from_json(text).map_err(err)?;
        Ok(PyTriangulation { inner: raw.triangulation().map_err(err)? })
    }

    #[staticmethod]
    fn one_vertex() -> Self {
        PyTriangulation { inner: generate::one_vertex() }
    }

    #[staticmethod]
    fn four_face() -> Self {
        PyTriangulation { inner: generate::four_face() }
    }

    /// Random triangulation with `faces` faces (even) and a random meridian.
    #[staticmethod]
    #[pyo3(signature = (faces, seed=0))]
    fn random(faces: usize, seed: u64) -> PyResult<Self> {
        use rand::SeedableRng;
        if faces < 2 || faces % 2 != 0 {
            return Err(SolidTorusError::new_err("the number of faces must be even and at least 2"));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Ok(PyTriangulation { inner: generate::random_triangulation(faces, &mut rng) })
    }

    fn to_json(&self) -> String {
        self.inner.to_raw().to_json()
    }

    #[getter]
    fn num_faces(&self) -> usize {
        self.inner.num_faces()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    /// Corner vector of the meridian.
    fn meridian_vector(&self) -> Vec<i64> {
        self.inner.path_vector(self.inner.meridian())
    }

    fn longitude_vector(&self) -> Vec<i64> {
        self.inner.path_vector(self.inner.longitude())
    }

    fn vertex_loop_vector(&self, v: usize) -> PyResult<Vec<i64>> {
        if v >= self.inner.num_vertices() {
            return Err(SolidTorusError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.path_vector(&self.inner.vertex_loop(v)))
    }

    /// Integer basis of the solutions of the homogeneous system.
    fn kernel_basis(&self) -> PyResult<Vec<Vec<i64>>> {
        kernel_basis(&self.inner).map_err(err)
    }

    /// The matrix `ᵗT Φ T`; raises if the symplectic relation fails.
    fn symplectic_matrix(&self) -> PyResult<Vec<Vec<i64>>> {
        Ok(verify_nz(&self.inner, self.inner.longitude()).map_err(err)?.matrix)
    }

    fn __repr__(&self) -> String {
        format!(
            "Triangulation(faces={}, edges={}, vertices={})",
            self.inner.num_faces(),
            self.inner.num_edges(),
            self.inner.num_vertices()
        )
    }
}

/// Exterior dihedral angles on the edges and the cone angle.
#[pyclass(name = "AngleAssignment", frozen)]
struct PyAngles {
    inner: AngleAssignment,
}

#[pymethods]
impl PyAngles {
    #[new]
    fn new(alpha: Vec<f64>, cone_angle: f64) -> PyResult<Self> {
        Ok(PyAngles { inner: AngleAssignment::new(alpha, cone_angle).map_err(err)? })
    }

    /// Reads the angle data of an instance JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let raw = RawInstance::from_json(text).map_err(err)?;
        Ok(PyAngles { inner: raw.angles().map_err(err)? })
    }

    #[getter]
    fn alpha(&self) -> Vec<f64> {
        self.inner.alpha.clone()
    }

    #[getter]
    fn cone_angle(&self) -> f64 {
        self.inner.cone_angle
    }

    #[getter]
    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }

    fn with_cone_angle(&self, k: f64) -> Self {
        PyAngles { inner: self.inner.with_cone_angle(k) }
    }

    fn __repr__(&self) -> String {
        format!("AngleAssignment(alpha={:?}, cone_angle={})", self.inner.alpha, self.inner.cone_angle)
    }
}

/// Triangulation and angles from an instance file.
#[pyfunction]
fn load_instance(path: &str) -> PyResult<(PyTriangulation, PyAngles)> {
    let raw = RawInstance::read(path).map_err(err)?;
    Ok((PyTriangulation { inner: raw.triangulation().map_err(err)? }, PyAngles { inner: raw.angles().map_err(err)? }))
}

fn check_sizes(tri: &PyTriangulation, a: &PyAngles) -> PyResult<()> {
    if tri.inner.num_edges() != a.inner.alpha.len() {
        return Err(SolidTorusError::new_err(format!(
            "expected {} edge angles, got {}",
            tri.inner.num_edges(),
            a.inner.alpha.len()
        )));
    }
    Ok(())
}

/// Report on the four admissibility conditions.
#[pyfunction]
#[pyo3(signature = (tri, angles, bound=None))]
fn validate<'py>(
    py: Python<'py>,
    tri: &PyTriangulation,
    angles: &PyAngles,
    bound: Option<u32>,
) -> PyResult<Bound<'py, PyAny>> {
    check_sizes(tri, angles)?;
    let report = py.detach(|| full_verdict(&tri.inner, &angles.inner, bound, &FeasibilityOptions::default()));
    let out = to_py(py, &report)?;
    out.set_item("admissible", report.admissible())?;
    Ok(out)
}

/// Positive solution of the angle system, or an obstruction certificate.
#[pyfunction]
#[pyo3(signature = (tri, angles, exact=false))]
fn solve<'py>(py: Python<'py>, tri: &PyTriangulation, angles: &PyAngles, exact: bool) -> PyResult<Bound<'py, PyAny>> {
    check_sizes(tri, angles)?;
    let a = if exact { angles.inner.clone() } else { angles.inner.to_numeric() };
    let opts = FeasibilityOptions { exact, ..Default::default() };
    let r = py.detach(|| find_positive_solution(&tri.inner, &a, &opts)).map_err(err)?;
    to_py(py, &r)
}

/// Volume maximizer, shapes, holonomy and core data.
#[pyfunction]
fn realize<'py>(py: Python<'py>, tri: &PyTriangulation, angles: &PyAngles) -> PyResult<Bound<'py, PyAny>> {
    check_sizes(tri, angles)?;
    let mut opts = RealizeOptions::default();
    opts.feasibility.exact = angles.inner.is_exact();
    let r = py.detach(|| realize_rs(&tri.inner, &angles.inner, &opts)).map_err(err)?;
    let out = to_py(py, &realization_json(&r))?;
    out.set_item("report", to_py(py, &r.report)?)?;
    Ok(out)
}

#[pyfunction]
fn lobachevsky(x: f64) -> f64 {
    lob::lobachevsky(x)
}

/// `Σ Л(θ_j)`.
#[pyfunction]
fn volume(theta: Vec<f64>) -> f64 {
    vol::volume(&theta)
}

#[pymodule(name = "solidtorus")]
fn solidtorus_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SolidTorusError", m.py().get_type::<SolidTorusError>())?;
    m.add_class::<PyTriangulation>()?;
    m.add_class::<PyAngles>()?;
    m.add_function(wrap_pyfunction!(load_instance, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(realize, m)?)?;
    m.add_function(wrap_pyfunction!(lobachevsky, m)?)?;
    m.add_function(wrap_pyfunction!(volume, m)?)?;
    Ok(())
}

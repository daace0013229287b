use std::path::PathBuf;

use hodgekit::complex::SummaryOptions;
use hodgekit::harmonic::{self, BasisOptions, HarmonicOptions, Method};
use hodgekit::io::{load_complex, MeshFormat};
use hodgekit::meshgen;
use hodgekit::{Calculus, CgOptions, Cochain, SimplicialComplex, StarKind};
use nalgebra::DMatrix;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pyhodgekit, HodgeError, PyException);

fn err(e: hodgekit::Error) -> PyErr {
    HodgeError::new_err(e.to_string())
}

fn star_of(name: &str, allow_indefinite: bool) -> PyResult<StarKind> {
    match name {
        "dec" => Ok(StarKind::Dec { allow_indefinite }),
        "whitney" => Ok(StarKind::Whitney),
        other => Err(PyValueError::new_err(format!("unknown star '{other}' (dec or whitney)"))),
    }
}

fn columns(h: &DMatrix<f64>) -> Vec<Vec<f64>> {
    h.column_iter().map(|c| c.iter().copied().collect()).collect()
}

/// A simplicial complex with all its faces.
#[pyclass(name = "Complex", module = "pyhodgekit", frozen)]
pub struct PyComplex {
    inner: SimplicialComplex,
}

#[pymethods]
impl PyComplex {
    #[new]
    #[pyo3(signature = (vertices, simplices, embedding_dim=None))]
    fn new(vertices: Vec<Vec<f64>>, simplices: Vec<Vec<usize>>, embedding_dim: Option<usize>) -> PyResult<Self> {
        let dim = embedding_dim.or_else(|| vertices.first().map(Vec::len)).unwrap_or(0);
        Ok(PyComplex { inner: SimplicialComplex::new(dim, vertices, simplices).map_err(err)? })
    }

    /// Load an OFF, JSON, or Triangle/TetGen mesh.
    #[staticmethod]
    #[pyo3(signature = (path, format=None, require_manifold=false))]
    fn load(path: PathBuf, format: Option<&str>, require_manifold: bool) -> PyResult<Self> {
        let format = match format {
            Some(f) => f.parse::<MeshFormat>().map_err(PyValueError::new_err)?,
            None => MeshFormat::from_path(&path)
                .ok_or_else(|| PyValueError::new_err("cannot tell the mesh format; pass format="))?,
        };
        Ok(PyComplex { inner: load_complex(&path, format, require_manifold).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn embedding_dim(&self) -> usize {
        self.inner.embedding_dim()
    }

    #[getter]
    fn counts(&self) -> Vec<usize> {
        self.inner.counts()
    }

    fn simplices(&self, p: usize) -> PyResult<Vec<Vec<usize>>> {
        if p > self.inner.dim() {
            return Err(PyValueError::new_err(format!("no {p}-simplices in a {}-complex", self.inner.dim())));
        }
        Ok(self.inner.simplices(p).iter().map(<[usize]>::to_vec).collect())
    }

    fn euler_characteristic(&self) -> i64 {
        self.inner.counts().iter().enumerate().map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    /// Betti numbers over the reals, or `None` above the dense limit.
    #[pyo3(signature = (dense_limit=5000))]
    fn betti_numbers(&self, dense_limit: usize) -> PyResult<Option<Vec<usize>>> {
        self.inner.betti_numbers(&SummaryOptions { dense_limit, ..SummaryOptions::default() }).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Complex(dim={}, counts={:?})", self.inner.dim(), self.inner.counts())
    }
}

type Paths = Vec<Vec<usize>>;

/// Torus mesh with its two vertex loops and two closed dual paths.
#[pyfunction]
#[pyo3(signature = (n_major=42, n_minor=12, major=4.0, minor=1.0))]
fn torus(n_major: usize, n_minor: usize, major: f64, minor: f64) -> PyResult<(PyComplex, Paths, Paths)> {
    let t = meshgen::torus(n_major, n_minor, major, minor).map_err(err)?;
    let loops = vec![t.longitude, t.latitude];
    let [a, b] = t.dual_cycles;
    Ok((PyComplex { inner: t.complex }, loops, vec![a, b]))
}

#[pyfunction]
#[pyo3(signature = (spacing=0.085))]
fn four_holed_disc(spacing: f64) -> PyResult<PyComplex> {
    Ok(PyComplex { inner: meshgen::four_holed_disc(spacing).map_err(err)?.complex })
}

#[pyfunction]
#[pyo3(signature = (outer=1.0, inner=0.4, spacing=0.1))]
fn annulus(outer: f64, inner: f64, spacing: f64) -> PyResult<PyComplex> {
    Ok(PyComplex { inner: meshgen::annulus(outer, inner, spacing).map_err(err)?.complex })
}

#[pyfunction]
#[pyo3(signature = (outer=1.0, inner=0.45, cube=0.31))]
fn solid_annulus(outer: f64, inner: f64, cube: f64) -> PyResult<PyComplex> {
    Ok(PyComplex { inner: meshgen::solid_annulus(outer, inner, cube).map_err(err)? })
}

/// Top simplices crossed by the segment `start -> end`, as a dual path.
#[pyfunction]
fn dual_path_along(complex: &PyComplex, start: Vec<f64>, end: Vec<f64>) -> PyResult<Vec<usize>> {
    meshgen::dual_path_along(&complex.inner, &start, &end).map_err(err)
}

/// Picket-fence cocycle of a dual path; a cochain of degree `dim - 1`.
#[pyfunction]
#[pyo3(signature = (complex, path, closed=false))]
fn cocycle_from_dual_path(complex: &PyComplex, path: Vec<usize>, closed: bool) -> PyResult<Vec<f64>> {
    Ok(harmonic::cocycle_from_dual_chain(&complex.inner, &path, closed).map_err(err)?.values.iter().copied().collect())
}

/// `(closed, |d omega|_inf)`.
#[pyfunction]
#[pyo3(signature = (complex, p, omega, tol=None))]
fn is_cocycle(complex: &PyComplex, p: usize, omega: Vec<f64>, tol: Option<f64>) -> PyResult<(bool, f64)> {
    let calc = Calculus::new(&complex.inner, StarKind::Whitney);
    let check = harmonic::is_cocycle(&calc, &Cochain::new(p, omega), tol).map_err(err)?;
    Ok((check.closed, check.norm))
}

/// Harmonic representative of the class of `omega`.
///
/// Returns a dict with `h`, `alpha` (or None), `converged`, `iterations`,
/// `relative_residual` and `laplacian_residual`.
#[pyfunction]
#[pyo3(signature = (complex, p, omega, method="ls", star="dec", tol=1e-12, max_iter=100_000, allow_indefinite_star=false))]
#[allow(clippy::too_many_arguments)]
fn harmonic_representative<'py>(
    py: Python<'py>,
    complex: &PyComplex,
    p: usize,
    omega: Vec<f64>,
    method: &str,
    star: &str,
    tol: f64,
    max_iter: usize,
    allow_indefinite_star: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let method: Method = method.parse().map_err(|e: hodgekit::Error| PyValueError::new_err(e.to_string()))?;
    let calc = Calculus::new(&complex.inner, star_of(star, allow_indefinite_star)?);
    let omega = Cochain::new(p, omega);
    let opts = HarmonicOptions { cg: CgOptions { tol, max_iter, preconditioner: None }, ..Default::default() };
    let res = match method {
        Method::Ls => harmonic::harmonic_ls(&calc, &omega, &opts),
        Method::GuYau => harmonic::gu_yau(&calc, &omega, &opts),
        Method::Desbrun => harmonic::desbrun(&calc, &omega, &opts),
        Method::Projection => harmonic::harmonic_basis_direct(&calc, p, &BasisOptions::default())
            .and_then(|b| harmonic::project_to_harmonics(&calc, &b, &omega, &opts)),
    }
    .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("h", res.h.values.as_slice().to_vec())?;
    out.set_item("alpha", res.alpha.map(|a| a.values.as_slice().to_vec()))?;
    out.set_item("converged", res.report.converged)?;
    out.set_item("iterations", res.report.iterations)?;
    out.set_item("relative_residual", res.report.relative_residual)?;
    out.set_item("laplacian_residual", res.diagnostics.laplacian_residual)?;
    Ok(out)
}

/// Star-orthonormal harmonic basis, one list per column.
#[pyfunction]
#[pyo3(signature = (complex, p, method="eigen-direct", star="dec", allow_indefinite_star=false))]
fn harmonic_basis(
    complex: &PyComplex,
    p: usize,
    method: &str,
    star: &str,
    allow_indefinite_star: bool,
) -> PyResult<Vec<Vec<f64>>> {
    let calc = Calculus::new(&complex.inner, star_of(star, allow_indefinite_star)?);
    let opts = BasisOptions::default();
    let basis = match method {
        "eigen-direct" => harmonic::harmonic_basis_direct(&calc, p, &opts),
        "eigen-mixed" => harmonic::harmonic_basis_mixed(&calc, p, &opts),
        other => return Err(PyValueError::new_err(format!("unknown basis method '{other}'"))),
    }
    .map_err(err)?;
    Ok(columns(&basis.h))
}

/// Harmonic 1-cochains with unit period on one vertex loop and zero on the others.
#[pyfunction]
#[pyo3(signature = (complex, loops, star="dec"))]
fn pair_with_loops(complex: &PyComplex, loops: Vec<Vec<usize>>, star: &str) -> PyResult<Vec<Vec<f64>>> {
    let cycles = harmonic::HomologyBasis::from_vertex_loops(&complex.inner, &loops).map_err(err)?;
    let calc = Calculus::new(&complex.inner, star_of(star, false)?);
    let basis = harmonic::harmonic_basis_direct(&calc, 1, &BasisOptions::default()).map_err(err)?;
    Ok(columns(&harmonic::pair_homology(&basis.h, &cycles).map_err(err)?))
}

#[pymodule]
fn pyhodgekit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HodgeError", m.py().get_type::<HodgeError>())?;
    m.add_class::<PyComplex>()?;
    m.add_function(wrap_pyfunction!(torus, m)?)?;
    m.add_function(wrap_pyfunction!(four_holed_disc, m)?)?;
    m.add_function(wrap_pyfunction!(annulus, m)?)?;
    m.add_function(wrap_pyfunction!(solid_annulus, m)?)?;
    m.add_function(wrap_pyfunction!(dual_path_along, m)?)?;
    m.add_function(wrap_pyfunction!(cocycle_from_dual_path, m)?)?;
    m.add_function(wrap_pyfunction!(is_cocycle, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_representative, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_basis, m)?)?;
    m.add_function(wrap_pyfunction!(pair_with_loops, m)?)?;
    Ok(())
}

//! Python bindings for the `ctxupb` library.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ctxupb::contextuality as ctx;
use ctxupb::entanglement as ent;
use ctxupb::families as fam;
use ctxupb::graphs as gr;
use ctxupb::linalg::{ComplexMatrix, ComplexVector, Tolerances, C64};
use ctxupb::upb;

create_exception!(ctxupb_py, CtxupbError, PyValueError);

fn err(e: ctxupb::Error) -> PyErr {
    CtxupbError::new_err(format!("{}: {e}", e.name()))
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for ctxupb::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(err)
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializes through JSON and hands back native Python objects.
fn to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(json_err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn tolerances(tol: f64) -> PyResult<Tolerances> {
    Tolerances::uniform(tol).py()
}

fn to_vector(v: Vec<C64>) -> ComplexVector {
    ComplexVector::from_vec(v)
}

fn from_vector(v: &ComplexVector) -> Vec<C64> {
    v.iter().copied().collect()
}

fn rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[pyclass(name = "VectorFamily", module = "ctxupb_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyVectorFamily(fam::VectorFamily);

#[pymethods]
impl PyVectorFamily {
    #[getter]
    fn label(&self) -> String {
        self.0.label.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }

    #[getter]
    fn vectors(&self) -> Vec<Vec<C64>> {
        self.0.vectors.iter().map(from_vector).collect()
    }

    #[getter]
    fn warning(&self) -> Option<String> {
        self.0.warning.clone()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Top eigenvalue of the projector sum.
    fn strength(&self) -> PyResult<f64> {
        Ok(ctx::strength(&self.0.vectors).py()?.value)
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn orthogonality_graph(&self, tol: f64) -> PyResult<PyGraph> {
        Ok(PyGraph(fam::orthogonality_graph(&self.0.vectors, &tolerances(tol)?).py()?))
    }

    /// Certifies the family against a graph and its Lovász number.
    fn verify_loor(&self, py: Python<'_>, expected: &PyGraph, theta: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &fam::verify_loor(&self.0, &expected.0, theta).py()?)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        format!("VectorFamily(label={:?}, dim={}, len={})", self.0.label, self.0.dim, self.0.len())
    }
}

#[pyclass(name = "Graph", module = "ctxupb_py", frozen, skip_from_py_object, eq)]
#[derive(Clone, PartialEq)]
pub struct PyGraph(gr::Graph);

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph(gr::Graph::from_edges(n, edges).py()?))
    }

    #[staticmethod]
    fn cycle(n: usize) -> PyResult<Self> {
        Ok(PyGraph(gr::cycle(n).py()?))
    }

    #[staticmethod]
    fn complete(n: usize) -> Self {
        PyGraph(gr::complete(n))
    }

    #[staticmethod]
    fn paley(q: u64) -> PyResult<Self> {
        Ok(PyGraph(gr::paley(q).py()?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().collect()
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        self.0.has_edge(i, j)
    }

    fn complement(&self) -> Self {
        PyGraph(gr::complement(&self.0))
    }

    fn is_cycle(&self) -> bool {
        gr::is_cycle(&self.0)
    }

    fn independence_number(&self) -> PyResult<usize> {
        gr::independence_number(&self.0).py()
    }

    fn maximum_independent_set(&self) -> PyResult<Vec<usize>> {
        gr::maximum_independent_set(&self.0).py()
    }

    /// Closed-form Lovász number when the graph is a recognised family.
    fn theta(&self) -> PyResult<Option<f64>> {
        Ok(ctx::closed_form_theta(&self.0).py()?.map(|t| t.value))
    }

    fn isomorphism(&self, other: &PyGraph) -> PyResult<Option<Vec<usize>>> {
        gr::isomorphism(&self.0, &other.0).py()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.0.n(), self.0.edge_count())
    }
}

#[pyclass(name = "ProductSet", module = "ctxupb_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyProductSet(upb::ProductSet);

fn method(name: &str) -> PyResult<upb::VerifyMethod> {
    match name {
        "exact" => Ok(upb::VerifyMethod::Exact),
        "bound" => Ok(upb::VerifyMethod::Bound),
        "auto" => Ok(upb::VerifyMethod::Auto),
        other => Err(PyValueError::new_err(format!(
            "unknown method `{other}`; expected exact, bound or auto"
        ))),
    }
}

#[pymethods]
impl PyProductSet {
    /// `states[j][m]` is the factor of state `j` on party `m`.
    #[new]
    fn new(party_dims: Vec<usize>, states: Vec<Vec<Vec<C64>>>) -> PyResult<Self> {
        let states = states.into_iter().map(|s| s.into_iter().map(to_vector).collect()).collect();
        Ok(PyProductSet(upb::ProductSet::new(party_dims, states).py()?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyProductSet(serde_json::from_str(text).map_err(json_err)?))
    }

    #[getter]
    fn party_dims(&self) -> Vec<usize> {
        self.0.party_dims().to_vec()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn states(&self) -> Vec<Vec<Vec<C64>>> {
        self.0.states().iter().map(|s| s.iter().map(from_vector).collect()).collect()
    }

    fn __len__(&self) -> usize {
        self.0.k()
    }

    fn without(&self, j: usize) -> PyResult<Self> {
        Ok(PyProductSet(self.0.without(j).py()?))
    }

    fn is_minimal(&self) -> bool {
        upb::is_minimal(&self.0)
    }

    #[pyo3(signature = (method = "auto", tol = 1e-9))]
    fn verify(&self, method: &str, tol: f64) -> PyResult<PyUpbVerdict> {
        let m = self::method(method)?;
        Ok(PyUpbVerdict(upb::verify_upb(&self.0, &tolerances(tol)?, m).py()?))
    }

    /// Normalized projector onto the orthogonal complement of a verified UPB.
    #[pyo3(signature = (tol = 1e-9))]
    fn bound_entangled_state(&self, tol: f64) -> PyResult<PyDensityMatrix> {
        let verdict = upb::verify_upb(&self.0, &tolerances(tol)?, upb::VerifyMethod::Auto).py()?;
        Ok(PyDensityMatrix(upb::bound_entangled_state(&self.0, &verdict).py()?))
    }

    /// Per-party orthogonality graphs.
    #[pyo3(signature = (tol = 1e-9))]
    fn party_graphs(&self, tol: f64) -> PyResult<Vec<PyGraph>> {
        let (graphs, _) = upb::party_graphs(&self.0, &tolerances(tol)?).py()?;
        Ok(graphs.into_iter().map(PyGraph).collect())
    }

    #[pyo3(signature = (other, tol = 1e-9))]
    fn graph_equivalent(&self, other: &PyProductSet, tol: f64) -> PyResult<Option<Vec<usize>>> {
        upb::upb_graph_equivalent(&self.0, &other.0, &tolerances(tol)?).py()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        format!("ProductSet(party_dims={:?}, k={})", self.0.party_dims(), self.0.k())
    }
}

#[pyclass(name = "UpbVerdict", module = "ctxupb_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyUpbVerdict(upb::UpbVerdict);

#[pymethods]
impl PyUpbVerdict {
    #[getter]
    fn status(&self) -> PyResult<String> {
        let v = serde_json::to_value(self.0.status).map_err(json_err)?;
        Ok(v.as_str().unwrap_or_default().to_string())
    }

    #[getter]
    fn is_upb(&self) -> bool {
        self.0.is_upb()
    }

    #[getter]
    fn witness(&self) -> Option<Vec<Vec<C64>>> {
        self.0.witness.as_ref().map(|w| w.iter().map(from_vector).collect())
    }

    #[getter]
    fn assignment(&self) -> Option<Vec<usize>> {
        self.0.assignment.clone()
    }

    #[getter]
    fn certificate(&self) -> Option<Vec<usize>> {
        self.0.certificate.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn __repr__(&self) -> PyResult<String> {
        Ok(format!("UpbVerdict(status={:?}, k={})", self.status()?, self.0.k))
    }
}

#[pyclass(name = "DensityMatrix", module = "ctxupb_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDensityMatrix(upb::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(matrix: Vec<Vec<C64>>, party_dims: Vec<usize>) -> PyResult<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = ComplexMatrix::from_fn(n, n, |i, j| matrix[i][j]);
        Ok(PyDensityMatrix(upb::DensityMatrix::new(m, party_dims).py()?))
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<C64>> {
        rows(&self.0.matrix)
    }

    #[getter]
    fn party_dims(&self) -> Vec<usize> {
        self.0.party_dims.clone()
    }

    fn trace(&self) -> C64 {
        self.0.trace()
    }

    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        self.0.eigenvalues().py()
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn rank(&self, tol: f64) -> PyResult<usize> {
        self.0.rank(&tolerances(tol)?).py()
    }

    fn min_pt_eigenvalue(&self, party: usize) -> PyResult<f64> {
        upb::min_pt_eigenvalue(&self.0, party).py()
    }

    #[pyo3(signature = (party, tol = 1e-9))]
    fn is_ppt(&self, party: usize, tol: f64) -> PyResult<bool> {
        upb::is_ppt(&self.0, party, &tolerances(tol)?).py()
    }

    fn linear_entropy(&self) -> f64 {
        ent::linear_entropy(&self.0)
    }

    /// Upper bound on the linear entropy of entanglement.
    #[pyo3(signature = (restarts = 64, seed = ent::DEFAULT_SEED, size = None))]
    fn lee_upper_bound(&self, py: Python<'_>, restarts: usize, seed: u64, size: Option<usize>) -> PyResult<Py<PyAny>> {
        let opts = ent::LeeOptions {
            size,
            restarts,
            seed,
            ..ent::LeeOptions::default()
        };
        let r = py.detach(|| ent::lee_upper_bound(&self.0, &opts)).py()?;
        to_py(py, &r)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(party_dims={:?})", self.0.party_dims)
    }
}

#[pyfunction]
fn one_param_family(theta: f64) -> PyResult<PyVectorFamily> {
    Ok(PyVectorFamily(fam::one_param_family(theta).py()?))
}

#[pyfunction]
fn pyramid() -> PyResult<PyVectorFamily> {
    Ok(PyVectorFamily(fam::pyramid().py()?))
}

#[pyfunction]
fn kcbs() -> PyResult<PyVectorFamily> {
    Ok(PyVectorFamily(fam::kcbs().py()?))
}

#[pyfunction]
fn genpyramid_local(m: u64, t: i64) -> PyResult<PyVectorFamily> {
    Ok(PyVectorFamily(fam::genpyramid_local(m, t).py()?))
}

#[pyfunction]
fn gen_kcbs(n: u64) -> PyResult<PyVectorFamily> {
    Ok(PyVectorFamily(fam::gen_kcbs(n).py()?))
}

#[pyfunction]
fn loor_cycle_complement(n: u64) -> PyResult<PyVectorFamily> {
    Ok(PyVectorFamily(fam::loor_cycle_complement(n).py()?))
}

#[pyfunction]
fn quadres_local(p: u64) -> PyResult<PyVectorFamily> {
    Ok(PyVectorFamily(fam::quadres_local(p).py()?))
}

#[pyfunction]
fn pyramid_upb() -> PyResult<PyProductSet> {
    Ok(PyProductSet(upb::pyramid_upb().py()?))
}

#[pyfunction]
fn one_param_upb(theta: f64) -> PyResult<PyProductSet> {
    Ok(PyProductSet(upb::one_param_upb(theta).py()?))
}

#[pyfunction]
fn genpyramid_upb(m: u64, t: i64) -> PyResult<PyProductSet> {
    Ok(PyProductSet(upb::genpyramid_upb(m, t).py()?))
}

#[pyfunction]
fn gencontextual_upb(n: u64) -> PyResult<PyProductSet> {
    Ok(PyProductSet(upb::gencontextual_upb(n).py()?))
}

#[pyfunction]
fn quadres_upb(p: u64) -> PyResult<PyProductSet> {
    Ok(PyProductSet(upb::quadres_upb(p).py()?))
}

#[pyfunction]
fn strength(vectors: Vec<Vec<C64>>) -> PyResult<f64> {
    let vs: Vec<ComplexVector> = vectors.into_iter().map(to_vector).collect();
    Ok(ctx::strength(&vs).py()?.value)
}

#[pyfunction]
fn theta_cycle(n: u64) -> PyResult<f64> {
    Ok(ctx::theta_cycle(n).py()?.value)
}

#[pyfunction]
fn theta_cycle_complement(n: u64) -> PyResult<f64> {
    Ok(ctx::theta_cycle_complement(n).py()?.value)
}

#[pyfunction]
fn theta_paley(q: u64) -> PyResult<f64> {
    Ok(ctx::theta_paley(q).py()?.value)
}

#[pyfunction]
fn table2(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &ctx::table2().py()?)
}

#[pyfunction]
#[pyo3(signature = (restarts = 64, seed = ent::DEFAULT_SEED))]
fn table1(py: Python<'_>, restarts: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let opts = ent::LeeOptions {
        restarts,
        seed,
        ..ent::LeeOptions::default()
    };
    let rows = py.detach(|| ent::table1(&opts)).py()?;
    to_py(py, &rows)
}

#[pymodule]
fn ctxupb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CtxupbError", m.py().get_type::<CtxupbError>())?;
    m.add("TILES_THETA", fam::TILES_THETA)?;
    m.add_class::<PyVectorFamily>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyProductSet>()?;
    m.add_class::<PyUpbVerdict>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_function(wrap_pyfunction!(one_param_family, m)?)?;
    m.add_function(wrap_pyfunction!(pyramid, m)?)?;
    m.add_function(wrap_pyfunction!(kcbs, m)?)?;
    m.add_function(wrap_pyfunction!(genpyramid_local, m)?)?;
    m.add_function(wrap_pyfunction!(gen_kcbs, m)?)?;
    m.add_function(wrap_pyfunction!(loor_cycle_complement, m)?)?;
    m.add_function(wrap_pyfunction!(quadres_local, m)?)?;
    m.add_function(wrap_pyfunction!(pyramid_upb, m)?)?;
    m.add_function(wrap_pyfunction!(one_param_upb, m)?)?;
    m.add_function(wrap_pyfunction!(genpyramid_upb, m)?)?;
    m.add_function(wrap_pyfunction!(gencontextual_upb, m)?)?;
    m.add_function(wrap_pyfunction!(quadres_upb, m)?)?;
    m.add_function(wrap_pyfunction!(strength, m)?)?;
    m.add_function(wrap_pyfunction!(theta_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(theta_cycle_complement, m)?)?;
    m.add_function(wrap_pyfunction!(theta_paley, m)?)?;
    m.add_function(wrap_pyfunction!(table1, m)?)?;
    m.add_function(wrap_pyfunction!(table2, m)?)?;
    Ok(())
}

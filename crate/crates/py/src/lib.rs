//! Python bindings: frame constructions, verification, perturbation and
//! witness checks, spark bounds, and the bound-comparison table.
//!
//! Reports cross the boundary as plain dicts (via their JSON form), frames
//! as a `Frame` class with bit-exact JSON (de)serialization.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use etfkit_core::designs::{affine_plane, projective_plane};
use etfkit_core::frames;
use etfkit_core::hadamard::{dft, real_hadamard};
use etfkit_core::pert;
use etfkit_core::sparsity;
use etfkit_core::Error;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// serde_json::Value -> Python object, for report types.
fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(match value {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into()
            } else {
                n.as_f64()
                    .ok_or_else(|| PyValueError::new_err("non-finite number"))?
                    .into_pyobject(py)?
                    .unbind()
                    .into()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.unbind().into(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.unbind().into()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.unbind().into()
        }
    })
}

fn report_to_py<T: serde::Serialize>(py: Python<'_>, report: &T) -> PyResult<Py<PyAny>> {
    let value = serde_json::to_value(report)
        .map_err(|e| PyValueError::new_err(format!("report serialization: {}", e)))?;
    json_to_py(py, &value)
}

fn matrix_to_py(py: Python<'_>, m: &DMatrix<Complex64>) -> PyResult<Py<PyAny>> {
    let rows = PyList::empty(py);
    for i in 0..m.nrows() {
        let row = PyList::empty(py);
        for j in 0..m.ncols() {
            row.append(m[(i, j)])?;
        }
        rows.append(row)?;
    }
    Ok(rows.unbind().into())
}

fn real_matrix_from_py(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if nrows == 0 || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err("expected a nonempty rectangular list of lists"));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// A unit-norm frame: N unit vectors as the columns of an r x N synthesis
/// matrix.
#[pyclass(frozen)]
struct Frame {
    inner: frames::Frame,
}

#[pymethods]
impl Frame {
    /// Ambient dimension r.
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Number of vectors N.
    #[getter]
    fn size(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn is_real(&self) -> bool {
        self.inner.is_real()
    }

    /// Synthesis matrix as a list of rows of Python complex numbers.
    fn synthesis(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        matrix_to_py(py, self.inner.synthesis())
    }

    /// Gram matrix V* V as a list of rows.
    fn gram(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        matrix_to_py(py, self.inner.gram().matrix())
    }

    /// Maximum off-diagonal Gram modulus.
    #[getter]
    fn coherence(&self) -> f64 {
        self.inner.gram().coherence()
    }

    /// Bit-exact JSON document (the CLI's frame format).
    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner)
            .map_err(|e| PyValueError::new_err(format!("serialization: {}", e)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Frame> {
        let inner: frames::Frame = serde_json::from_str(text)
            .map_err(|e| PyValueError::new_err(format!("parse error: {}", e)))?;
        Ok(Frame { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Frame(dim={}, size={}, real={})",
            self.inner.dim(),
            self.inner.len(),
            self.inner.is_real()
        )
    }
}

/// Regular simplex ETF: r + 1 vectors in dimension r.
#[pyfunction]
fn simplex_etf(r: usize) -> PyResult<Frame> {
    if r < 1 {
        return Err(PyValueError::new_err("r must be at least 1"));
    }
    Ok(Frame { inner: frames::simplex_etf(r) })
}

/// Steiner ETF from a finite plane ("affine" or "projective") of order q
/// and a Hadamard matrix ("real" or "dft").
#[pyfunction]
fn steiner_etf(plane: &str, q: u64, hadamard: &str) -> PyResult<Frame> {
    let sys = match plane {
        "affine" => affine_plane(q).map_err(err)?,
        "projective" => projective_plane(q).map_err(err)?,
        other => return Err(PyValueError::new_err(format!("unknown plane kind {:?}", other))),
    };
    let order = 1 + sys.rho();
    let h = match hadamard {
        "real" => real_hadamard(order).map_err(err)?,
        "dft" => dft(order),
        other => return Err(PyValueError::new_err(format!("unknown Hadamard kind {:?}", other))),
    };
    Ok(Frame { inner: frames::steiner_etf(&sys, &h).map_err(err)? })
}

/// Naimark complement: N vectors in dimension N - r.
#[pyfunction]
fn naimark_complement(f: &Frame) -> PyResult<Frame> {
    Ok(Frame { inner: frames::naimark_complement(&f.inner).map_err(err)? })
}

/// Seeded random unit-norm tight frame via polar-factor tightening.
#[pyfunction]
#[pyo3(signature = (r, n, real=true, seed=0))]
fn random_untf(r: usize, n: usize, real: bool, seed: u64) -> PyResult<Frame> {
    if r < 1 || r > n {
        return Err(PyValueError::new_err("need 1 <= r <= n"));
    }
    Ok(Frame { inner: frames::random_untf(r, n, real, seed).map_err(err)? })
}

/// The Welch coherence lower bound sqrt((N - r)/(r (N - 1))).
#[pyfunction]
fn welch_bound(n: usize, r: usize) -> PyResult<f64> {
    frames::welch_bound(n, r).map_err(err)
}

/// Full frame verification report as a dict (UNTF/ETF flags, residuals).
#[pyfunction]
fn verify(py: Python<'_>, f: &Frame) -> PyResult<Py<PyAny>> {
    let rep = frames::verify_frame(&f.inner).map_err(err)?;
    report_to_py(py, &rep)
}

/// Overlap inequality and, for ETFs, the fourth-moment gap spectrum.
#[pyfunction]
fn pert_check(py: Python<'_>, f: &Frame) -> PyResult<Py<PyAny>> {
    let overlap = pert::overlap_inequality_check(&f.inner).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("overlap", report_to_py(py, &overlap)?)?;
    let rep = frames::verify_frame(&f.inner).map_err(err)?;
    let mut passed = overlap.passed;
    if rep.is_etf {
        let g = pert::etf_gap(&f.inner).map_err(err)?;
        let gap = PyDict::new(py);
        gap.set_item("eigenvalues", g.eigenvalues.clone())?;
        gap.set_item("min_eig", g.min_eig)?;
        gap.set_item("kernel_dim", g.kernel_dim)?;
        gap.set_item("passed", g.passed)?;
        passed &= g.passed;
        dict.set_item("gap", gap)?;
    } else {
        dict.set_item("gap", py.None())?;
    }
    dict.set_item("passed", passed)?;
    Ok(dict.unbind().into())
}

/// Apply the elliptope perturbation projector to a Hermitian matrix given
/// as a list of rows (real entries accepted via Python complex).
#[pyfunction]
fn project_pert(py: Python<'_>, f: &Frame, a: Vec<Vec<Complex64>>) -> PyResult<Py<PyAny>> {
    let n = f.inner.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(PyValueError::new_err(format!("expected an {n} x {n} matrix")));
    }
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let out = pert::project_pert(&f.inner, &m).map_err(err)?;
    matrix_to_py(py, &out)
}

/// Degree-4 moment-matrix witness as a list of rows of floats.
#[pyfunction]
fn sos_witness(f: &Frame) -> PyResult<Vec<Vec<f64>>> {
    let y = pert::sos_witness(&f.inner).map_err(err)?;
    Ok((0..y.nrows())
        .map(|i| (0..y.ncols()).map(|j| y[(i, j)]).collect())
        .collect())
}

/// Check the four membership conditions of a witness matrix against a
/// frame; returns a dict of named checks.
#[pyfunction]
fn verify_witness(py: Python<'_>, y: Vec<Vec<f64>>, f: &Frame) -> PyResult<Py<PyAny>> {
    let y = real_matrix_from_py(y)?;
    let x = f.inner.gram().matrix().map(|z| z.re);
    let rep = pert::verify_e4_membership(&y, &x).map_err(err)?;
    report_to_py(py, &rep)
}

/// Spark bounds and, when exact=True, exact spark/cospark by enumeration.
#[pyfunction]
#[pyo3(signature = (f, exact=false, cap=None))]
fn spark(py: Python<'_>, f: &Frame, exact: bool, cap: Option<usize>) -> PyResult<Py<PyAny>> {
    let rep = sparsity::bound_report(&f.inner, exact, cap).map_err(err)?;
    report_to_py(py, &rep)
}

/// Gershgorin spark bound 1 + 1/alpha.
#[pyfunction]
fn gershgorin_bound(alpha: f64) -> PyResult<f64> {
    sparsity::gershgorin_bound(alpha).map_err(err)
}

/// NERF spark bound N (1 + (N-r)(N-r-1)/(N-1))^{-1}.
#[pyfunction]
fn nerf_bound(n: usize, r: usize) -> PyResult<f64> {
    sparsity::nerf_bound(n, r).map_err(err)
}

/// Fourth-moment (sparsity_lb, spark_lb) pair.
#[pyfunction]
fn corollary_bounds(n: usize, r: usize) -> PyResult<(f64, f64)> {
    sparsity::corollary_bounds(n, r).map_err(err)
}

/// Bound-comparison rows for the four N ~ r^{3/2} families at parameter q.
#[pyfunction]
fn table1(py: Python<'_>, q: u64) -> PyResult<Py<PyAny>> {
    if q < 2 {
        return Err(PyValueError::new_err("q must be at least 2"));
    }
    report_to_py(py, &sparsity::table1(q))
}

/// The n x n DFT matrix as a list of rows.
#[pyfunction]
fn dft_matrix(py: Python<'_>, n: usize) -> PyResult<Py<PyAny>> {
    if n < 1 {
        return Err(PyValueError::new_err("n must be at least 1"));
    }
    matrix_to_py(py, &dft(n).to_dmatrix())
}

/// A real Hadamard matrix of order n, if one is constructible.
#[pyfunction]
fn real_hadamard_matrix(py: Python<'_>, n: usize) -> PyResult<Py<PyAny>> {
    let h = real_hadamard(n).map_err(err)?;
    matrix_to_py(py, &h.to_dmatrix())
}

#[pymodule]
fn etfkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Frame>()?;
    m.add_function(wrap_pyfunction!(simplex_etf, m)?)?;
    m.add_function(wrap_pyfunction!(steiner_etf, m)?)?;
    m.add_function(wrap_pyfunction!(naimark_complement, m)?)?;
    m.add_function(wrap_pyfunction!(random_untf, m)?)?;
    m.add_function(wrap_pyfunction!(welch_bound, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(pert_check, m)?)?;
    m.add_function(wrap_pyfunction!(project_pert, m)?)?;
    m.add_function(wrap_pyfunction!(sos_witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify_witness, m)?)?;
    m.add_function(wrap_pyfunction!(spark, m)?)?;
    m.add_function(wrap_pyfunction!(gershgorin_bound, m)?)?;
    m.add_function(wrap_pyfunction!(nerf_bound, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(table1, m)?)?;
    m.add_function(wrap_pyfunction!(dft_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(real_hadamard_matrix, m)?)?;
    Ok(())
}

//! Python bindings. Matrices cross the boundary as lists of rows of Python
//! complex numbers; anything `complex()` accepts works as an entry.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use pseudoherm::antisym::kramers_check;
use pseudoherm::io;
use pseudoherm::jordan::{jordan_decompose as decompose, JordanDecomposition};
use pseudoherm::pseudoherm::{self as ph, classify_spectrum};
use pseudoherm::report::{self, AnalysisReport};
use pseudoherm::sweep::{sweep as run_sweep, Family};
use pseudoherm::{ComplexMatrix, Error, TolerancePolicy};

create_exception!(pseudoherm_py, InputError, PyValueError, "Malformed input: shape, parse or tolerance errors.");
create_exception!(
    pseudoherm_py,
    NumericalError,
    PyArithmeticError,
    "A numerical stage failed (ambiguous clusters, ill-conditioning, failed certificate)."
);

fn to_py(err: Error) -> PyErr {
    if err.is_numerical() {
        NumericalError::new_err(err.to_string())
    } else {
        InputError::new_err(err.to_string())
    }
}

type Rows = Vec<Vec<Complex64>>;

fn to_matrix(rows: Rows) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(to_py)
}

fn to_rows(m: &ComplexMatrix) -> Rows {
    m.to_rows()
}

fn policy(tol: Option<&Tolerances>) -> TolerancePolicy {
    tol.map(|t| t.inner).unwrap_or_default()
}

fn json_value(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Tolerance policy; omitted values take the library defaults.
#[pyclass(frozen, module = "pseudoherm_py")]
struct Tolerances {
    inner: TolerancePolicy,
}

#[pymethods]
impl Tolerances {
    #[new]
    #[pyo3(signature = (eig_tol=None, rank_tol=None, residual_tol=None, realness_tol=None))]
    fn new(eig_tol: Option<f64>, rank_tol: Option<f64>, residual_tol: Option<f64>, realness_tol: Option<f64>) -> PyResult<Self> {
        let d = TolerancePolicy::default();
        let inner = TolerancePolicy::new(
            eig_tol.unwrap_or(d.eig_cluster_tol),
            rank_tol.unwrap_or(d.rank_tol),
            residual_tol.unwrap_or(d.residual_tol),
            realness_tol.unwrap_or(d.realness_tol),
        )
        .map_err(to_py)?;
        Ok(Tolerances { inner })
    }

    #[getter]
    fn eig_tol(&self) -> f64 {
        self.inner.eig_cluster_tol
    }

    #[getter]
    fn rank_tol(&self) -> f64 {
        self.inner.rank_tol
    }

    #[getter]
    fn residual_tol(&self) -> f64 {
        self.inner.residual_tol
    }

    #[getter]
    fn realness_tol(&self) -> f64 {
        self.inner.realness_tol
    }

    fn __repr__(&self) -> String {
        let t = &self.inner;
        format!(
            "Tolerances(eig_tol={:e}, rank_tol={:e}, residual_tol={:e}, realness_tol={:e})",
            t.eig_cluster_tol, t.rank_tol, t.residual_tol, t.realness_tol
        )
    }
}

/// Jordan ledger with biorthonormal frames `psi` (right) and `phi` (left).
#[pyclass(frozen, name = "JordanDecomposition", module = "pseudoherm_py")]
struct PyJordan {
    inner: JordanDecomposition,
}

#[pymethods]
impl PyJordan {
    /// Distinct eigenvalues.
    #[getter]
    fn eigenvalues(&self) -> Vec<Complex64> {
        self.inner.eigenvalues().to_vec()
    }

    /// `(eigenvalue_index, degeneracy_label, size)` per block, in column order.
    #[getter]
    fn blocks(&self) -> Vec<(usize, usize, usize)> {
        self.inner
            .blocks()
            .iter()
            .map(|b| (b.eigenvalue_index, b.degeneracy_label, b.size))
            .collect()
    }

    #[getter]
    fn segre(&self) -> Vec<usize> {
        self.inner.segre_sizes()
    }

    #[getter]
    fn psi(&self) -> Rows {
        to_rows(self.inner.psi())
    }

    #[getter]
    fn phi(&self) -> Rows {
        to_rows(self.inner.phi())
    }

    #[getter]
    fn jordan_matrix(&self) -> Rows {
        to_rows(&self.inner.jordan_matrix())
    }

    #[getter]
    fn is_diagonalizable(&self) -> bool {
        self.inner.is_diagonalizable()
    }

    fn geometric_multiplicity(&self, eigenvalue_index: usize) -> PyResult<usize> {
        self.check_index(eigenvalue_index)?;
        Ok(self.inner.geometric_multiplicity(eigenvalue_index))
    }

    fn algebraic_multiplicity(&self, eigenvalue_index: usize) -> PyResult<usize> {
        self.check_index(eigenvalue_index)?;
        Ok(self.inner.algebraic_multiplicity(eigenvalue_index))
    }

    /// Residuals of the defining identities, keyed by name.
    fn certificates(&self) -> Vec<(&'static str, f64)> {
        let c = self.inner.certificates();
        vec![
            ("reconstruction", c.reconstruction),
            ("biorthonormality", c.biorthonormality),
            ("completeness", c.completeness),
            ("chain", c.chain),
            ("similarity_condition", c.similarity_condition),
        ]
    }

    fn __repr__(&self) -> String {
        format!(
            "JordanDecomposition(n={}, eigenvalues={}, segre={:?})",
            self.inner.dim(),
            self.inner.eigenvalues().len(),
            self.inner.segre_sizes()
        )
    }
}

impl PyJordan {
    fn check_index(&self, n: usize) -> PyResult<()> {
        if n >= self.inner.eigenvalues().len() {
            return Err(InputError::new_err(format!("eigenvalue index {n} out of range")));
        }
        Ok(())
    }
}

/// Output of `build_eta`.
#[pyclass(frozen, module = "pseudoherm_py")]
struct Metric {
    #[pyo3(get)]
    eta: Rows,
    /// `(n_plus, n_minus)`
    #[pyo3(get)]
    inertia: (usize, usize),
    #[pyo3(get)]
    residual: f64,
    #[pyo3(get)]
    hermiticity_residual: f64,
}

#[pymethods]
impl Metric {
    #[getter]
    fn definite(&self) -> bool {
        self.inertia.0 == 0 || self.inertia.1 == 0
    }

    fn __repr__(&self) -> String {
        format!("Metric(inertia={:?}, residual={:e})", self.inertia, self.residual)
    }
}

/// Full analysis report.
#[pyclass(frozen, name = "AnalysisReport", module = "pseudoherm_py")]
struct PyReport {
    inner: AnalysisReport,
}

#[pymethods]
impl PyReport {
    /// Verdict of the Hermitian-intertwiner oracle.
    #[getter]
    fn is_pseudo_hermitian(&self) -> bool {
        self.inner.is_pseudo_hermitian()
    }

    #[getter]
    fn condition_i(&self) -> bool {
        self.inner.classification.condition_i_holds
    }

    #[getter]
    fn verdicts_agree(&self) -> bool {
        self.inner.verdict.agree
    }

    #[getter]
    fn diagonalizable(&self) -> bool {
        self.inner.jordan.diagonalizable
    }

    #[getter]
    fn inertia(&self) -> Option<(usize, usize)> {
        self.inner.eta.as_ref().map(|e| (e.inertia.positive, e.inertia.negative))
    }

    #[getter]
    fn kramers_pairing(&self) -> bool {
        self.inner.kramers.pairing_ok
    }

    #[getter]
    fn digest(&self) -> String {
        self.inner.input.digest.clone()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        json_value(py, &self.inner.to_json())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "AnalysisReport(n={}, pseudo_hermitian={})",
            self.inner.input.dimension,
            self.inner.is_pseudo_hermitian()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (matrix, tol=None))]
fn jordan_decompose(matrix: Rows, tol: Option<&Tolerances>) -> PyResult<PyJordan> {
    let h = to_matrix(matrix)?;
    let inner = decompose(&h, &policy(tol)).map_err(to_py)?;
    Ok(PyJordan { inner })
}

/// Whether the spectrum is real or conjugate-paired with matching blocks.
#[pyfunction]
#[pyo3(signature = (matrix, tol=None))]
fn condition_i(matrix: Rows, tol: Option<&Tolerances>) -> PyResult<bool> {
    let tol = policy(tol);
    let jd = decompose(&to_matrix(matrix)?, &tol).map_err(to_py)?;
    Ok(classify_spectrum(&jd, &tol).map_err(to_py)?.condition_i_holds)
}

/// The canonical metric built from the Jordan data.
#[pyfunction]
#[pyo3(signature = (matrix, tol=None))]
fn build_eta(matrix: Rows, tol: Option<&Tolerances>) -> PyResult<Metric> {
    let tol = policy(tol);
    let jd = decompose(&to_matrix(matrix)?, &tol).map_err(to_py)?;
    let cls = classify_spectrum(&jd, &tol).map_err(to_py)?;
    let (_, m) = ph::build_eta(&jd, &cls, &tol).map_err(to_py)?;
    Ok(Metric {
        eta: to_rows(&m.eta),
        inertia: (m.inertia.positive, m.inertia.negative),
        residual: m.residual,
        hermiticity_residual: m.hermiticity_residual,
    })
}

/// Basis of `{X : X H = H† X}`, restricted to Hermitian `X` by default.
#[pyfunction]
#[pyo3(signature = (matrix, hermitian_only=true, tol=None))]
fn intertwiner_space(matrix: Rows, hermitian_only: bool, tol: Option<&Tolerances>) -> PyResult<Vec<Rows>> {
    let basis = ph::intertwiner_space(&to_matrix(matrix)?, hermitian_only, &policy(tol)).map_err(to_py)?;
    Ok(basis.iter().map(to_rows).collect())
}

/// `(n_plus, n_minus)` of a Hermitian matrix.
#[pyfunction]
#[pyo3(signature = (eta, tol=None))]
fn inertia(eta: Rows, tol: Option<&Tolerances>) -> PyResult<(usize, usize)> {
    let i = ph::inertia(&to_matrix(eta)?, &policy(tol)).map_err(to_py)?;
    Ok((i.positive, i.negative))
}

/// `(pairing_ok, T)` where `T` is the linear part `L` of `𝔗 = L K`, or `None`.
#[pyfunction]
#[pyo3(signature = (matrix, tol=None))]
fn kramers(matrix: Rows, tol: Option<&Tolerances>) -> PyResult<(bool, Option<Rows>)> {
    let tol = policy(tol);
    let jd = decompose(&to_matrix(matrix)?, &tol).map_err(to_py)?;
    let cls = classify_spectrum(&jd, &tol).map_err(to_py)?;
    let v = kramers_check(&jd, &cls);
    Ok((v.pairing_ok, v.t.map(|t| to_rows(t.linear_part()))))
}

#[pyfunction]
#[pyo3(signature = (matrix, tol=None))]
fn analyze(matrix: Rows, tol: Option<&Tolerances>) -> PyResult<PyReport> {
    let inner = report::analyze(&to_matrix(matrix)?, &policy(tol)).map_err(to_py)?;
    Ok(PyReport { inner })
}

/// Sweeps `heff` or an affine template file; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (family, start, stop, steps, energy=1.0, r=1.0, tol=None))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    family: &str,
    start: f64,
    stop: f64,
    steps: usize,
    energy: f64,
    r: f64,
    tol: Option<&Tolerances>,
) -> PyResult<Py<PyAny>> {
    let family = Family::resolve(family, energy, r).map_err(to_py)?;
    let out = run_sweep(&family, start, stop, steps, &policy(tol)).map_err(to_py)?;
    json_value(py, &report::to_json(&out))
}

#[pyfunction]
fn read_matrix(path: &str) -> PyResult<Rows> {
    Ok(to_rows(&io::read_matrix(path).map_err(to_py)?))
}

#[pyfunction]
fn write_matrix(path: &str, matrix: Rows) -> PyResult<()> {
    io::write_matrix(path, &to_matrix(matrix)?).map_err(to_py)
}

#[pyfunction]
fn parse_matrix(text: &str) -> PyResult<Rows> {
    Ok(to_rows(&io::parse_matrix(text).map_err(to_py)?))
}

#[pyfunction]
fn format_matrix(matrix: Rows) -> PyResult<String> {
    Ok(io::format_matrix(&to_matrix(matrix)?))
}

#[pymodule]
fn pseudoherm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("InputError", m.py().get_type::<InputError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<Tolerances>()?;
    m.add_class::<PyJordan>()?;
    m.add_class::<Metric>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(jordan_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(condition_i, m)?)?;
    m.add_function(wrap_pyfunction!(build_eta, m)?)?;
    m.add_function(wrap_pyfunction!(intertwiner_space, m)?)?;
    m.add_function(wrap_pyfunction!(inertia, m)?)?;
    m.add_function(wrap_pyfunction!(kramers, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(read_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(write_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(parse_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(format_matrix, m)?)?;
    Ok(())
}

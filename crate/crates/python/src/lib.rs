//! Python bindings: Hamiltonians, squeezed coherent states, symplectic propagation,
//! Iwasawa factors, thermodynamic reports and scenario verification.

use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict};

use gausskin_core::runner::{self, CheckStatus};
use gausskin_core::scenario::{self, Scenario};
use gausskin_core::{thermo, Constants, Stepper, SymplecticMatrix};

/// Row-major nested lists to a matrix.
pub fn to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err("matrix must be non-empty".into());
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(format!("row {bad} has {} entries, expected {ncols}", rows[bad].len()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn parse_stepper(name: &str) -> Result<Stepper, String> {
    match name {
        "midpoint" => Ok(Stepper::Midpoint),
        "magnus4" => Ok(Stepper::Magnus4),
        other => Err(format!("unknown stepper `{other}` (expected midpoint or magnus4)")),
    }
}

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_arg(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    to_matrix(&rows).map_err(value_err)
}

fn vector(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

/// Quadratic Hamiltonian `H = ½qᵀa q + qᵀb p + ½pᵀc p`.
#[pyclass(name = "Hamiltonian", module = "gausskin", frozen)]
pub struct PyHamiltonian {
    inner: gausskin_core::HamiltonianSpec,
}

#[pymethods]
impl PyHamiltonian {
    /// Constant coefficient blocks given as nested lists.
    #[staticmethod]
    fn constant(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, c: Vec<Vec<f64>>) -> PyResult<Self> {
        let spec = gausskin_core::HamiltonianSpec::constant(&matrix_arg(a)?, &matrix_arg(b)?, &matrix_arg(c)?)
            .map_err(value_err)?;
        Ok(Self { inner: spec })
    }

    /// Parse the `hamiltonian` object of a scenario file.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn harmonic_oscillator() -> Self {
        Self {
            inner: gausskin_core::HamiltonianSpec::harmonic_oscillator(),
        }
    }

    #[staticmethod]
    fn free_particle() -> Self {
        Self {
            inner: gausskin_core::HamiltonianSpec::free_particle(),
        }
    }

    #[staticmethod]
    fn parametric_oscillator() -> Self {
        Self {
            inner: gausskin_core::HamiltonianSpec::parametric_oscillator(),
        }
    }

    #[staticmethod]
    fn coupled_2d() -> Self {
        Self {
            inner: gausskin_core::HamiltonianSpec::coupled_2d(),
        }
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings().to_vec()
    }

    /// `(a, b, c)` at time `t`.
    fn blocks(&self, t: f64) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let (a, b, c) = self.inner.blocks_at(t).map_err(value_err)?;
        Ok((from_matrix(&a), from_matrix(&b), from_matrix(&c)))
    }

    /// Hamiltonian matrix `L_H` at time `t`.
    fn generator(&self, t: f64) -> PyResult<Vec<Vec<f64>>> {
        let gen = gausskin_core::generator_at(&self.inner, t).map_err(value_err)?;
        Ok(from_matrix(&gen.matrix))
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian(n={})", self.inner.n())
    }
}

/// A squeezed coherent state described by its means and Iwasawa data.
#[pyclass(name = "GaussianState", module = "gausskin", frozen)]
pub struct PyGaussianState {
    inner: gausskin_core::GaussianState,
}

#[pymethods]
impl PyGaussianState {
    /// Minimum-uncertainty state (`s = I`, `g = 0`) at t = 0.
    #[staticmethod]
    #[pyo3(signature = (mean_q, mean_p, hbar = 1.0, kb = 1.0))]
    fn ground(mean_q: Vec<f64>, mean_p: Vec<f64>, hbar: f64, kb: f64) -> PyResult<Self> {
        let constants = Constants::new(hbar, kb).map_err(value_err)?;
        let inner = gausskin_core::GaussianState::initial_ground_with(constants, mean_q.len(), &mean_q, &mean_p)
            .map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn mean_q(&self) -> Vec<f64> {
        self.inner.mean_q.iter().copied().collect()
    }

    #[getter]
    fn mean_p(&self) -> Vec<f64> {
        self.inner.mean_p.iter().copied().collect()
    }

    #[getter]
    fn s2(&self) -> Vec<Vec<f64>> {
        from_matrix(&self.inner.s2)
    }

    #[getter]
    fn g(&self) -> Vec<Vec<f64>> {
        from_matrix(&self.inner.g)
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    fn covariance(&self) -> PyResult<Vec<Vec<f64>>> {
        Ok(from_matrix(&gausskin_core::covariance(&self.inner).map_err(value_err)?.full()))
    }

    fn wigner_matrix(&self) -> PyResult<Vec<Vec<f64>>> {
        Ok(from_matrix(&gausskin_core::wigner_matrix(&self.inner).map_err(value_err)?.matrix))
    }

    fn wigner_density(&self, z: Vec<f64>) -> PyResult<f64> {
        gausskin_core::wigner_density(&self.inner, &vector(&z)).map_err(value_err)
    }

    fn amplitude(&self, q: Vec<f64>) -> PyResult<f64> {
        gausskin_core::amplitude_at(&self.inner, &vector(&q)).map_err(value_err)
    }

    fn phase(&self, q: Vec<f64>) -> PyResult<f64> {
        gausskin_core::phase_at(&self.inner, &vector(&q)).map_err(value_err)
    }

    fn psi<'py>(&self, py: Python<'py>, q: Vec<f64>) -> PyResult<Bound<'py, PyComplex>> {
        let z = gausskin_core::psi_at(&self.inner, &vector(&q)).map_err(value_err)?;
        Ok(PyComplex::from_doubles(py, z.re, z.im))
    }

    fn __repr__(&self) -> String {
        format!(
            "GaussianState(n={}, t={}, mean_q={:?}, mean_p={:?})",
            self.inner.n,
            self.inner.t,
            self.inner.mean_q.as_slice(),
            self.inner.mean_p.as_slice()
        )
    }
}

/// Symplectic propagator from `t0` to `t1`.
#[pyfunction]
#[pyo3(signature = (hamiltonian, t0, t1, steps, stepper = "midpoint"))]
fn propagate(hamiltonian: &PyHamiltonian, t0: f64, t1: f64, steps: usize, stepper: &str) -> PyResult<Vec<Vec<f64>>> {
    let stepper = parse_stepper(stepper).map_err(value_err)?;
    let s = gausskin_core::propagate_with(&hamiltonian.inner, t0, t1, steps, stepper).map_err(value_err)?;
    Ok(from_matrix(&s.matrix))
}

#[pyfunction]
fn symplecticity_defect(matrix: Vec<Vec<f64>>) -> PyResult<f64> {
    let s = SymplecticMatrix::from_matrix(matrix_arg(matrix)?).map_err(value_err)?;
    Ok(gausskin_core::symplecticity_defect(&s))
}

/// Iwasawa factors of a symplectic matrix as a dict with keys `g`, `s`, `u_re`, `u_im`
/// and `alpha`.
#[pyfunction]
fn iwasawa<'py>(py: Python<'py>, matrix: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let s = SymplecticMatrix::from_matrix(matrix_arg(matrix)?).map_err(value_err)?;
    let f = gausskin_core::iwasawa(&s).map_err(value_err)?;
    let out = PyDict::new(py);
    out.set_item("g", from_matrix(&f.g))?;
    out.set_item("s", from_matrix(&f.s))?;
    out.set_item("u_re", from_matrix(&f.u.map(|z| z.re)))?;
    out.set_item("u_im", from_matrix(&f.u.map(|z| z.im)))?;
    out.set_item("alpha", f.alpha)?;
    Ok(out)
}

/// Evolve a state to `t1`.
#[pyfunction]
#[pyo3(signature = (hamiltonian, state, t1, steps, stepper = "midpoint"))]
fn evolve_state(
    hamiltonian: &PyHamiltonian,
    state: &PyGaussianState,
    t1: f64,
    steps: usize,
    stepper: &str,
) -> PyResult<PyGaussianState> {
    let stepper = parse_stepper(stepper).map_err(value_err)?;
    let inner = gausskin_core::evolve_state_with(&hamiltonian.inner, &state.inner, t1, steps, stepper)
        .map_err(value_err)?;
    Ok(PyGaussianState { inner })
}

/// Thermodynamic observables of a state as a dict keyed by column name.
#[pyfunction]
fn thermo_report<'py>(
    py: Python<'py>,
    state: &PyGaussianState,
    hamiltonian: &PyHamiltonian,
) -> PyResult<Bound<'py, PyDict>> {
    let report = thermo::thermo_report(&state.inner, &hamiltonian.inner).map_err(value_err)?;
    let out = PyDict::new(py);
    for (name, value) in thermo::ThermoReport::COLUMNS.iter().zip(report.values()) {
        out.set_item(*name, value)?;
    }
    Ok(out)
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    scenario::PRESET_NAMES.to_vec()
}

/// JSON text of a shipped preset scenario.
#[pyfunction]
fn preset_json(name: &str) -> PyResult<String> {
    Ok(scenario::preset(name).map_err(value_err)?.to_json())
}

/// Run the oracle checks on a scenario given as JSON text. Returns a list of
/// `(name, status, metric, threshold)` tuples with status `pass`, `fail` or `skipped`.
#[pyfunction]
fn verify(py: Python<'_>, scenario_json: &str) -> PyResult<Vec<(String, String, f64, f64)>> {
    let scenario = Scenario::from_json(scenario_json).map_err(value_err)?;
    let report = py.detach(|| runner::verify(&scenario)).map_err(value_err)?;
    Ok(report
        .checks
        .into_iter()
        .map(|c| {
            let status = match c.status {
                CheckStatus::Pass => "pass".to_string(),
                CheckStatus::Fail => "fail".to_string(),
                CheckStatus::Skipped(why) => format!("skipped: {why}"),
            };
            (c.name.to_string(), status, c.metric, c.threshold)
        })
        .collect())
}

#[pymodule]
fn gausskin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyGaussianState>()?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(symplecticity_defect, m)?)?;
    m.add_function(wrap_pyfunction!(iwasawa, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_state, m)?)?;
    m.add_function(wrap_pyfunction!(thermo_report, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset_json, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("DEFAULT_TOL", gausskin_core::DEFAULT_TOL)?;
    Ok(())
}

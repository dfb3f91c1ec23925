//! Python bindings for `entcost`.
//!
//! States cross the boundary either as nested lists of complex numbers or as
//! the JSON state-file text used by the CLI. Entropic values are in nats.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use entcost::cli::fixtures::{generate_fixture, FixtureKind, FixtureParams};
use entcost::dilution::{self, ScissorsVariant};
use entcost::entanglement::{self as ent, CostSource, CqExtension, EofOptions, SearchOptions};
use entcost::qcore::io::{parse_state, read_state as read_state_file, state_to_string, StateFile};
use entcost::qcore::{self, BipartiteSplit, ComplexMatrix, Subsystem, C64};
use entcost::spectra::{self, SweepMode, SweepSource};

create_exception!(entcost, EntcostError, PyException);

fn err(e: entcost::Error) -> PyErr {
    EntcostError::new_err(format!("{}: {e}", e.code()))
}

fn split_of(dims: Option<(usize, usize)>) -> PyResult<Option<BipartiteSplit>> {
    dims.map(|(a, b)| BipartiteSplit::new(a, b)).transpose().map_err(err)
}

fn dims_of(split: Option<BipartiteSplit>) -> Option<(usize, usize)> {
    split.map(|s| (s.dim_a, s.dim_b))
}

fn search_options(restarts: usize, seed: u64, max_sweeps: usize, members: Option<usize>) -> EofOptions {
    EofOptions {
        member_count: members,
        search: SearchOptions {
            restarts,
            seed,
            max_sweeps,
            ..SearchOptions::default()
        },
    }
}

fn grid(min: f64, max: f64, step: f64) -> PyResult<Vec<f64>> {
    spectra::gamma_grid(min, max, step).map_err(err)
}

#[pyclass(name = "DensityMatrix", module = "entcost", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDensityMatrix {
    inner: qcore::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// `data` is a square nested list of complex entries, row-major.
    #[new]
    #[pyo3(signature = (data, dims=None))]
    fn new(data: Vec<Vec<C64>>, dims: Option<(usize, usize)>) -> PyResult<Self> {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        if data.iter().any(|r| r.len() != cols) {
            return Err(EntcostError::new_err("dimension_mismatch: ragged matrix rows"));
        }
        let m = ComplexMatrix::new(rows, cols, data.into_iter().flatten().collect()).map_err(err)?;
        let inner = qcore::DensityMatrix::new(m, split_of(dims)?).map_err(err)?;
        Ok(Self { inner })
    }

    /// Parses a state file; pure states and ensembles are turned into their
    /// density matrix.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_state(text).and_then(|s| s.to_density()).map_err(err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        state_to_string(&StateFile::Density(self.inner.clone())).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn dims(&self) -> Option<(usize, usize)> {
        dims_of(self.inner.split())
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        let m = self.inner.matrix();
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues()
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn entropy(&self) -> f64 {
        qcore::von_neumann_entropy(&self.inner)
    }

    /// Reduced state on `"A"` or `"B"`.
    fn partial_trace(&self, keep: &str) -> PyResult<Self> {
        let keep = match keep {
            "A" | "a" => Subsystem::A,
            "B" | "b" => Subsystem::B,
            other => {
                return Err(EntcostError::new_err(format!(
                    "invalid_parameter: subsystem {other:?} is not A or B"
                )))
            }
        };
        let split = self.inner.require_split().map_err(err)?;
        let inner = qcore::partial_trace(&self.inner, split, keep).map_err(err)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={}, dims={:?})", self.inner.dim(), self.dims())
    }
}

#[pyclass(name = "PureState", module = "entcost", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyPureState {
    inner: qcore::PureState,
}

#[pymethods]
impl PyPureState {
    /// Amplitudes are normalized on construction.
    #[new]
    #[pyo3(signature = (amplitudes, dims=None))]
    fn new(amplitudes: Vec<C64>, dims: Option<(usize, usize)>) -> PyResult<Self> {
        let inner = qcore::PureState::normalized(amplitudes, split_of(dims)?).map_err(err)?;
        Ok(Self { inner })
    }

    /// Two-party state with the given Schmidt coefficients on the diagonal.
    #[staticmethod]
    fn from_schmidt(coefficients: Vec<f64>) -> PyResult<Self> {
        let inner = entcost::cli::fixtures::schmidt_fixture(&coefficients).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dims(&self) -> Option<(usize, usize)> {
        dims_of(self.inner.split())
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.inner.amplitudes().to_vec()
    }

    /// Squared Schmidt coefficients, non-increasing.
    fn schmidt_coefficients(&self) -> PyResult<Vec<f64>> {
        let split = self.inner.require_split().map_err(err)?;
        qcore::schmidt_coefficients(&self.inner, split).map_err(err)
    }

    fn density(&self) -> PyDensityMatrix {
        PyDensityMatrix {
            inner: qcore::DensityMatrix::from_pure(&self.inner),
        }
    }

    fn to_json(&self) -> PyResult<String> {
        state_to_string(&StateFile::Pure(self.inner.clone())).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("PureState(dim={}, dims={:?})", self.inner.dim(), self.dims())
    }
}

#[pyclass(name = "Ensemble", module = "entcost", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyEnsemble {
    inner: ent::Ensemble,
}

#[pymethods]
impl PyEnsemble {
    #[new]
    fn new(probabilities: Vec<f64>, members: Vec<PyRef<'_, PyPureState>>) -> PyResult<Self> {
        let members = members.iter().map(|m| m.inner.clone()).collect();
        let inner = ent::Ensemble::new(probabilities, members).map_err(err)?;
        Ok(Self { inner })
    }

    /// Accepts `pure` and `ensemble` state files; a density matrix becomes
    /// its eigen-decomposition.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = match parse_state(text).map_err(err)? {
            StateFile::Ensemble(e) => e,
            StateFile::Pure(psi) => ent::Ensemble::single(psi).map_err(err)?,
            StateFile::Density(rho) => eigen_ensemble(&rho)?,
        };
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        state_to_string(&StateFile::Ensemble(self.inner.clone())).map_err(err)
    }

    #[getter]
    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities().to_vec()
    }

    #[getter]
    fn dims(&self) -> (usize, usize) {
        let s = self.inner.split();
        (s.dim_a, s.dim_b)
    }

    fn members(&self) -> Vec<PyPureState> {
        self.inner
            .members()
            .iter()
            .map(|m| PyPureState { inner: m.clone() })
            .collect()
    }

    fn mixture(&self) -> PyResult<PyDensityMatrix> {
        Ok(PyDensityMatrix {
            inner: self.inner.mixture().map_err(err)?,
        })
    }

    /// Average reduced entropy `Σ p_i S(Tr_B ψ_i)`.
    fn average_entropy(&self) -> f64 {
        ent::eof_objective(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Ensemble(members={}, dims={:?})", self.inner.len(), self.dims())
    }
}

fn eigen_ensemble(rho: &qcore::DensityMatrix) -> PyResult<ent::Ensemble> {
    let k = rho.rank().max(1);
    ent::ensemble_from_isometry(rho, &ComplexMatrix::identity(k), k).map_err(err)
}

#[pyclass(name = "EntanglementReport", module = "entcost", frozen, get_all)]
pub struct PyEntanglementReport {
    value_nats: f64,
    value_bits: f64,
    member_count: usize,
    witness_copies: usize,
    restarts_used: usize,
    converged: bool,
    witness: Py<PyEnsemble>,
    json: String,
}

impl PyEntanglementReport {
    fn wrap(py: Python<'_>, r: ent::EntanglementReport) -> PyResult<Self> {
        Ok(Self {
            value_nats: r.value_nats,
            value_bits: r.value_bits(),
            member_count: r.member_count,
            witness_copies: r.witness_copies,
            restarts_used: r.restarts_used,
            converged: r.converged,
            json: r.to_json().map_err(err)?.to_string(),
            witness: Py::new(py, PyEnsemble { inner: r.witness })?,
        })
    }
}

#[pymethods]
impl PyEntanglementReport {
    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "EntanglementReport(value_nats={}, members={}, converged={})",
            self.value_nats, self.member_count, self.converged
        )
    }
}

#[pyclass(name = "DilutionReport", module = "entcost", frozen, get_all)]
pub struct PyDilutionReport {
    n: usize,
    m_rank: usize,
    rate_nats: f64,
    rate_bits: f64,
    fidelity_sim: f64,
    fidelity_formula: f64,
    lower_bound: f64,
    upper_bound: f64,
    variant: String,
    json: String,
}

#[pymethods]
impl PyDilutionReport {
    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "DilutionReport(m_rank={}, fidelity_sim={}, variant={})",
            self.m_rank, self.fidelity_sim, self.variant
        )
    }
}

#[pyclass(name = "GammaSweep", module = "entcost", frozen)]
pub struct PyGammaSweep {
    inner: spectra::GammaSweep,
}

#[pymethods]
impl PyGammaSweep {
    #[getter]
    fn gamma_grid(&self) -> Vec<f64> {
        self.inner.gamma_grid.clone()
    }

    #[getter]
    fn n_values(&self) -> Vec<usize> {
        self.inner.n_values.clone()
    }

    /// One row per n, aligned with `gamma_grid`.
    #[getter]
    fn f_values(&self) -> Vec<Vec<f64>> {
        self.inner.f_values.clone()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    /// Crossings at `epsilon`, 1/2 and `1 - epsilon`, one dict per n.
    #[pyo3(signature = (epsilon=0.1))]
    fn estimates<'py>(&self, py: Python<'py>, epsilon: f64) -> PyResult<Vec<Bound<'py, PyDict>>> {
        spectra::rate_estimate(&self.inner, epsilon)
            .map_err(err)?
            .into_iter()
            .map(|e| {
                let d = PyDict::new(py);
                d.set_item("n", e.n)?;
                d.set_item("gamma_low", e.gamma_low)?;
                d.set_item("gamma_high", e.gamma_high)?;
                d.set_item("midpoint", e.midpoint)?;
                d.set_item("epsilon", e.epsilon)?;
                d.set_item("open_low", e.open_low)?;
                d.set_item("open_high", e.open_high)?;
                Ok(d)
            })
            .collect()
    }
}

/// Loads a state file and returns a `DensityMatrix`, `PureState` or
/// `Ensemble` according to its kind.
#[pyfunction]
fn read_state(py: Python<'_>, path: std::path::PathBuf) -> PyResult<Py<PyAny>> {
    state_object(py, read_state_file(path).map_err(err)?)
}

fn state_object(py: Python<'_>, state: StateFile) -> PyResult<Py<PyAny>> {
    Ok(match state {
        StateFile::Density(inner) => Py::new(py, PyDensityMatrix { inner })?.into_any(),
        StateFile::Pure(inner) => Py::new(py, PyPureState { inner })?.into_any(),
        StateFile::Ensemble(inner) => Py::new(py, PyEnsemble { inner })?.into_any(),
    })
}

/// Generates one of the CLI fixtures: bell, werner, random-mixed,
/// random-pure or product.
#[pyfunction]
#[pyo3(signature = (kind, dims=(2, 2), p=0.9, rank=None, seed=0))]
fn fixture(
    py: Python<'_>,
    kind: &str,
    dims: (usize, usize),
    p: f64,
    rank: Option<usize>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let kind = match kind {
        "bell" => FixtureKind::Bell,
        "werner" => FixtureKind::Werner,
        "random-mixed" => FixtureKind::RandomMixed,
        "random-pure" => FixtureKind::RandomPure,
        "product" => FixtureKind::Product,
        other => {
            return Err(EntcostError::new_err(format!(
                "invalid_parameter: unknown fixture kind {other:?}"
            )))
        }
    };
    let params = FixtureParams { dims, p, rank, seed };
    state_object(py, generate_fixture(kind, &params).map_err(err)?)
}

#[pyfunction]
fn fidelity(rho: &PyDensityMatrix, sigma: &PyDensityMatrix) -> PyResult<f64> {
    qcore::fidelity(&rho.inner, &sigma.inner).map_err(err)
}

#[pyfunction]
fn relative_entropy(rho: &PyDensityMatrix, omega: &PyDensityMatrix) -> PyResult<f64> {
    qcore::relative_entropy(&rho.inner, &omega.inner).map_err(err)
}

#[pyfunction]
fn concurrence_two_qubit(rho: &PyDensityMatrix) -> PyResult<f64> {
    ent::concurrence_two_qubit(&rho.inner).map_err(err)
}

/// Closed-form two-qubit entanglement of formation.
#[pyfunction]
fn eof_two_qubit(rho: &PyDensityMatrix) -> PyResult<f64> {
    ent::eof_two_qubit(&rho.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rho, members=None, restarts=20, seed=0, max_sweeps=500))]
fn eof_minimize(
    py: Python<'_>,
    rho: &PyDensityMatrix,
    members: Option<usize>,
    restarts: usize,
    seed: u64,
    max_sweeps: usize,
) -> PyResult<PyEntanglementReport> {
    let opts = search_options(restarts, seed, max_sweeps, members);
    let inner = rho.inner.clone();
    let report = py.detach(move || ent::eof_minimize(&inner, &opts)).map_err(err)?;
    PyEntanglementReport::wrap(py, report)
}

/// `[(n, E_F(ρ^{⊗n}) / n)]` for `n = 1..=n_max`.
#[pyfunction]
#[pyo3(signature = (rho, n_max, members=None, restarts=20, seed=0, max_sweeps=500))]
fn eof_regularized(
    py: Python<'_>,
    rho: &PyDensityMatrix,
    n_max: usize,
    members: Option<usize>,
    restarts: usize,
    seed: u64,
    max_sweeps: usize,
) -> PyResult<Vec<(usize, f64)>> {
    let opts = search_options(restarts, seed, max_sweeps, members);
    let inner = rho.inner.clone();
    let points = py
        .detach(move || ent::eof_regularized_estimate(&inner, n_max, &opts))
        .map_err(err)?;
    Ok(points.into_iter().map(|p| (p.n, p.value_per_copy)).collect())
}

/// Finite-n cost proxy. With `explicit=True`, `rho` is the n-th state itself.
#[pyfunction]
#[pyo3(signature = (rho, n, explicit=false, members=None, restarts=20, seed=0, max_sweeps=500))]
#[allow(clippy::too_many_arguments)]
fn cost_proxy(
    py: Python<'_>,
    rho: &PyDensityMatrix,
    n: usize,
    explicit: bool,
    members: Option<usize>,
    restarts: usize,
    seed: u64,
    max_sweeps: usize,
) -> PyResult<PyEntanglementReport> {
    let opts = search_options(restarts, seed, max_sweeps, members);
    let source = if explicit {
        CostSource::Explicit(rho.inner.clone())
    } else {
        CostSource::Iid(rho.inner.clone())
    };
    let report = py
        .detach(move || ent::cost_proxy_minimize(&source, n, &opts))
        .map_err(err)?;
    PyEntanglementReport::wrap(py, report)
}

/// `f_n(γ) = Tr[{ρ^{⊗n} − e^{nγ} ω^{⊗n} >= 0}(ρ^{⊗n} − e^{nγ} ω^{⊗n})]`.
#[pyfunction]
#[pyo3(signature = (rho, omega, n_values, gamma_min=-2.0, gamma_max=2.0, gamma_step=0.01))]
fn spectral_sweep(
    py: Python<'_>,
    rho: &PyDensityMatrix,
    omega: &PyDensityMatrix,
    n_values: Vec<usize>,
    gamma_min: f64,
    gamma_max: f64,
    gamma_step: f64,
) -> PyResult<PyGammaSweep> {
    let source = SweepSource::Iid {
        rho: rho.inner.clone(),
        omega: omega.inner.matrix().clone(),
    };
    let g = grid(gamma_min, gamma_max, gamma_step)?;
    let inner = py
        .detach(move || spectra::gamma_sweep(&source, &n_values, &g, SweepMode::Divergence))
        .map_err(err)?;
    Ok(PyGammaSweep { inner })
}

/// Sweep of the n-fold cq-extension of an ensemble on the
/// conditional-entropy axis.
#[pyfunction]
#[pyo3(signature = (ensemble, n_values, gamma_min=-2.0, gamma_max=2.0, gamma_step=0.01))]
fn conditional_sweep(
    py: Python<'_>,
    ensemble: &PyEnsemble,
    n_values: Vec<usize>,
    gamma_min: f64,
    gamma_max: f64,
    gamma_step: f64,
) -> PyResult<PyGammaSweep> {
    let source = SweepSource::IidCq(CqExtension::new(ensemble.inner.clone()));
    let g = grid(gamma_min, gamma_max, gamma_step)?;
    let inner = py
        .detach(move || spectra::gamma_sweep(&source, &n_values, &g, SweepMode::ConditionalEntropy))
        .map_err(err)?;
    Ok(PyGammaSweep { inner })
}

/// Closed-form fidelity of the dilution protocol with Schmidt rank `m`.
#[pyfunction]
fn dilution_fidelity(ensemble: &PyEnsemble, m: usize) -> PyResult<f64> {
    dilution::dilution_fidelity_formula(&ensemble.inner, m).map_err(err)
}

/// Runs the dilution protocol once; `variant` is `orthogonal-flag` or
/// `weyl-teleport`. `n` only rescales the reported rate.
#[pyfunction]
#[pyo3(signature = (ensemble, m, variant="orthogonal-flag", n=1))]
fn simulate_dilution(
    py: Python<'_>,
    ensemble: &PyEnsemble,
    m: usize,
    variant: &str,
    n: usize,
) -> PyResult<PyDilutionReport> {
    let variant: ScissorsVariant = variant.parse().map_err(err)?;
    let e = ensemble.inner.clone();
    let r = py
        .detach(move || dilution::simulate_dilution(&e, m, variant)?.with_block_length(n))
        .map_err(err)?;
    Ok(PyDilutionReport {
        n: r.n,
        m_rank: r.m_rank,
        rate_nats: r.rate_nats,
        rate_bits: r.rate_bits(),
        fidelity_sim: r.fidelity_sim,
        fidelity_formula: r.fidelity_formula,
        lower_bound: r.lower_bound,
        upper_bound: r.upper_bound,
        variant: r.variant.label().to_string(),
        json: r.to_json().to_string(),
    })
}

/// `F²(n, R)` of the dilution protocol on `ensemble^{⊗n}`, one dict per
/// `(n, rate)` pair.
#[pyfunction]
fn achievability_curve<'py>(
    py: Python<'py>,
    ensemble: &PyEnsemble,
    rates_nats: Vec<f64>,
    n_values: Vec<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let e = ensemble.inner.clone();
    let rows = py
        .detach(move || dilution::achievability_curve_iid(&e, &rates_nats, &n_values))
        .map_err(err)?;
    rows.into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("n", r.n)?;
            d.set_item("rate_nats", r.rate_nats)?;
            d.set_item("m_rank", r.m_rank)?;
            d.set_item("f2", r.f2_formula)?;
            d.set_item("f2_lower", r.f2_lower)?;
            d.set_item("f2_upper", r.f2_upper)?;
            Ok(d)
        })
        .collect()
}

/// Converse bound on `F²` at rate `rate_nats` and threshold `gamma` for the
/// n-fold cq-extension of `ensemble`.
#[pyfunction]
fn converse_bound(ensemble: &PyEnsemble, gamma: f64, rate_nats: f64, n: usize) -> f64 {
    dilution::converse_bound(&CqExtension::new(ensemble.inner.clone()), gamma, rate_nats, n)
}

/// Maximally entangled rank `⌈e^{nR}⌉`.
#[pyfunction]
fn rate_to_rank(n: usize, rate_nats: f64) -> u128 {
    dilution::rate_to_rank(n, rate_nats)
}

#[pyfunction]
fn effective_rate(n: usize, m: u128) -> f64 {
    dilution::effective_rate(n, m)
}

#[pymodule]
#[pyo3(name = "entcost")]
fn entcost_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("EntcostError", m.py().get_type::<EntcostError>())?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyPureState>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_class::<PyEntanglementReport>()?;
    m.add_class::<PyDilutionReport>()?;
    m.add_class::<PyGammaSweep>()?;
    m.add_function(wrap_pyfunction!(read_state, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(relative_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence_two_qubit, m)?)?;
    m.add_function(wrap_pyfunction!(eof_two_qubit, m)?)?;
    m.add_function(wrap_pyfunction!(eof_minimize, m)?)?;
    m.add_function(wrap_pyfunction!(eof_regularized, m)?)?;
    m.add_function(wrap_pyfunction!(cost_proxy, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(dilution_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_dilution, m)?)?;
    m.add_function(wrap_pyfunction!(achievability_curve, m)?)?;
    m.add_function(wrap_pyfunction!(converse_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rate_to_rank, m)?)?;
    m.add_function(wrap_pyfunction!(effective_rate, m)?)?;
    Ok(())
}

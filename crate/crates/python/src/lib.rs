//! Python bindings for `spinqnd`.
//!
//! Quadratures are named `"J_y"`, `"J_z"`, `"S1_y"`, `"S1_z"`, `"S2_y"`,
//! `"S2_z"`. Reports come back as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spinqnd::analytics::{self, Branch};
use spinqnd::coupling;
use spinqnd::gaussian;
use spinqnd::montecarlo;
use spinqnd::oracle::{self, ExactSystem};
use spinqnd::{Coord, Error, ExperimentConfig, Probe};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn coord(name: &str) -> PyResult<Coord> {
    Coord::ALL
        .into_iter()
        .find(|c| c.name() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown quadrature {name:?}")))
}

fn probe(index: u8) -> PyResult<Probe> {
    match index {
        1 => Ok(Probe::First),
        2 => Ok(Probe::Second),
        _ => Err(PyValueError::new_err("probe must be 1 or 2")),
    }
}

fn branch(sign: &str) -> PyResult<Branch> {
    match sign {
        "+" => Ok(Branch::Plus),
        "-" => Ok(Branch::Minus),
        _ => Err(PyValueError::new_err("sign must be '+' or '-'")),
    }
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Atomic and optical constants, SI units with angular frequencies.
#[pyclass(name = "PhysicalParams", skip_from_py_object)]
struct PyPhysicalParams {
    inner: spinqnd::PhysicalParams,
}

#[pymethods]
impl PyPhysicalParams {
    #[new]
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (gamma, sigma0, w0, delta, delta0, n_atoms, n_photons, epsilon_a = 0.0))]
    fn new(
        gamma: f64,
        sigma0: f64,
        w0: f64,
        delta: f64,
        delta0: f64,
        n_atoms: f64,
        n_photons: f64,
        epsilon_a: f64,
    ) -> PyResult<Self> {
        let inner = spinqnd::PhysicalParams {
            gamma,
            sigma0,
            w0,
            delta,
            delta0,
            n_atoms,
            n_photons,
            epsilon_a,
        };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn yb171() -> Self {
        Self {
            inner: spinqnd::PhysicalParams::yb171(),
        }
    }

    fn kappa(&self) -> PyResult<f64> {
        coupling::kappa_from_physics(&self.inner).map_err(to_py)
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[getter]
    fn sigma0(&self) -> f64 {
        self.inner.sigma0
    }
    #[getter]
    fn w0(&self) -> f64 {
        self.inner.w0
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }
    #[getter]
    fn delta0(&self) -> f64 {
        self.inner.delta0
    }
    #[getter]
    fn n_atoms(&self) -> f64 {
        self.inner.n_atoms
    }
    #[getter]
    fn n_photons(&self) -> f64 {
        self.inner.n_photons
    }
    #[getter]
    fn epsilon_a(&self) -> f64 {
        self.inner.epsilon_a
    }

    /// Copy with some fields replaced.
    #[pyo3(signature = (**changes))]
    fn replace(&self, changes: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p = self.inner;
        if let Some(changes) = changes {
            for (key, value) in changes.iter() {
                let key: String = key.extract()?;
                let value: f64 = value.extract()?;
                let slot = match key.as_str() {
                    "gamma" => &mut p.gamma,
                    "sigma0" => &mut p.sigma0,
                    "w0" => &mut p.w0,
                    "delta" => &mut p.delta,
                    "delta0" => &mut p.delta0,
                    "n_atoms" => &mut p.n_atoms,
                    "n_photons" => &mut p.n_photons,
                    "epsilon_a" => &mut p.epsilon_a,
                    _ => return Err(PyValueError::new_err(format!("unknown field {key:?}"))),
                };
                *slot = value;
            }
        }
        p.validate().map_err(to_py)?;
        Ok(Self { inner: p })
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// Gaussian state of the spin and both probe pulses.
#[pyclass(name = "GaussianState", skip_from_py_object)]
struct PyGaussianState {
    inner: spinqnd::GaussianState,
}

#[pymethods]
impl PyGaussianState {
    /// Coherent spin state and two coherent probe pulses.
    #[new]
    fn new() -> Self {
        Self {
            inner: spinqnd::GaussianState::fresh(),
        }
    }

    fn apply_faraday(&self, probe_index: u8, kappa: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.apply_faraday(probe(probe_index)?, kappa),
        })
    }

    fn apply_rotation(&self, phi: f64) -> Self {
        Self {
            inner: self.inner.apply_rotation(phi),
        }
    }

    fn apply_loss(&self, epsilon: f64) -> PyResult<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(PyValueError::new_err("epsilon out of [0,1)"));
        }
        Ok(Self {
            inner: self.inner.apply_loss(epsilon),
        })
    }

    fn condition_on(&self, quadrature: &str, outcome: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self
                .inner
                .condition_on(coord(quadrature)?, outcome)
                .map_err(to_py)?,
        })
    }

    fn variance(&self, quadrature: &str) -> PyResult<f64> {
        Ok(self.inner.marginal_variance(coord(quadrature)?))
    }

    fn mean_of(&self, quadrature: &str) -> PyResult<f64> {
        Ok(self.inner.marginal_mean(coord(quadrature)?))
    }

    fn covariance(&self, a: &str, b: &str) -> PyResult<f64> {
        Ok(self.inner.covariance(coord(a)?, coord(b)?))
    }

    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.inner.mean.iter().copied().collect()
    }

    #[getter]
    fn cov(&self) -> Vec<Vec<f64>> {
        (0..6)
            .map(|r| (0..6).map(|c| self.inner.cov[(r, c)]).collect())
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("GaussianState(mean={:?})", self.mean())
    }
}

#[pyfunction]
fn kappa_from_physics(params: PyRef<'_, PyPhysicalParams>) -> PyResult<f64> {
    params.kappa()
}

#[pyfunction]
fn rotation_angle(rate: f64, width: f64) -> PyResult<f64> {
    let pulse = spinqnd::RotationPulse::new(rate, width).map_err(to_py)?;
    Ok(coupling::rotation_angle(&pulse))
}

#[pyfunction]
fn v1(kappa: f64) -> f64 {
    analytics::v1(kappa)
}

#[pyfunction]
fn v2(kappa: f64, phi: f64) -> f64 {
    analytics::v2(kappa, phi)
}

#[pyfunction]
fn v_pm(kappa: f64, phi: f64, sign: &str) -> PyResult<f64> {
    Ok(analytics::v_pm(kappa, phi, branch(sign)?))
}

#[pyfunction]
fn g_opt(kappa: f64) -> f64 {
    analytics::g_opt(kappa)
}

#[pyfunction]
fn v_cond(kappa: f64, phi: f64) -> f64 {
    analytics::v_cond(kappa, phi)
}

#[pyfunction]
fn v_coh(kappa: f64) -> f64 {
    analytics::v_coh(kappa)
}

#[pyfunction]
#[pyo3(signature = (kappa, phi, loss_epsilon = 0.0))]
fn squeezing_db(kappa: f64, phi: f64, loss_epsilon: f64) -> PyResult<f64> {
    analytics::squeezing_db(kappa, phi, loss_epsilon).map_err(to_py)
}

/// Engine variances of the full protocol as a dict.
#[pyfunction]
#[pyo3(signature = (kappa, phi, loss_epsilon = 0.0))]
fn protocol_variances<'py>(
    py: Python<'py>,
    kappa: f64,
    phi: f64,
    loss_epsilon: f64,
) -> PyResult<Bound<'py, PyDict>> {
    if !(0.0..1.0).contains(&loss_epsilon) {
        return Err(PyValueError::new_err("loss_epsilon out of [0,1)"));
    }
    let v = gaussian::protocol_variances(kappa, phi, loss_epsilon).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("v1", v.v1)?;
    d.set_item("v2", v.v2)?;
    d.set_item("v_plus", v.v_plus)?;
    d.set_item("v_minus", v.v_minus)?;
    d.set_item("v_cond", v.v_cond)?;
    d.set_item("v_coh", v.v_coh)?;
    d.set_item("g_opt", v.g_opt)?;
    Ok(d)
}

/// Monte Carlo sweep; returns `{"global_g", "squeezed", "coherent"}` with one
/// report dict per angle.
#[pyfunction]
#[pyo3(signature = (kappa, angles, shots, seed, loss_epsilon = 0.0))]
fn sweep<'py>(
    py: Python<'py>,
    kappa: f64,
    angles: Vec<f64>,
    shots: usize,
    seed: u64,
    loss_epsilon: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let config = ExperimentConfig {
        kappa,
        angles,
        shots,
        loss_epsilon,
        seed,
    };
    let result = py.detach(|| montecarlo::sweep(&config)).map_err(to_py)?;
    let squeezed: Vec<_> = result.squeezed.iter().map(|r| &r.report).collect();
    let coherent: Vec<_> = result.coherent.iter().map(|r| &r.report).collect();
    let d = PyDict::new(py);
    d.set_item("global_g", result.global_g)?;
    d.set_item("squeezed", json_to_py(py, &squeezed)?)?;
    d.set_item("coherent", json_to_py(py, &coherent)?)?;
    Ok(d)
}

/// Exact small-ensemble variances as a dict.
#[pyfunction]
fn exact_protocol_stats<'py>(
    py: Python<'py>,
    n_atoms: usize,
    n_photons: usize,
    kappa: f64,
    phi: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let system = ExactSystem::new(n_atoms, n_photons, kappa).map_err(to_py)?;
    let stats = py
        .detach(|| oracle::exact_protocol_stats(&system, phi))
        .map_err(to_py)?;
    json_to_py(py, &stats)
}

#[pymodule]
fn pyspinqnd(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPhysicalParams>()?;
    m.add_class::<PyGaussianState>()?;
    m.add_function(wrap_pyfunction!(kappa_from_physics, m)?)?;
    m.add_function(wrap_pyfunction!(rotation_angle, m)?)?;
    m.add_function(wrap_pyfunction!(v1, m)?)?;
    m.add_function(wrap_pyfunction!(v2, m)?)?;
    m.add_function(wrap_pyfunction!(v_pm, m)?)?;
    m.add_function(wrap_pyfunction!(g_opt, m)?)?;
    m.add_function(wrap_pyfunction!(v_cond, m)?)?;
    m.add_function(wrap_pyfunction!(v_coh, m)?)?;
    m.add_function(wrap_pyfunction!(squeezing_db, m)?)?;
    m.add_function(wrap_pyfunction!(protocol_variances, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(exact_protocol_stats, m)?)?;
    Ok(())
}

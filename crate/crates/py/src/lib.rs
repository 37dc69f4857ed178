//! Python bindings.
//!
//! Functions are passed by name (`"abs"`, `"randpoly8"`, ...) or as a list of
//! monomial coefficients, so evaluation never needs the GIL and heavy calls
//! release it.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use asymod_core::approx::{best_approx_sequence, BestApproxResult};
use asymod_core::harness::{
    converse_table as core_converse_table, verify_lemma1 as core_verify_lemma1, ConverseConfig,
    Lemma1Config, TestFunction,
};
use asymod_core::modulus::{modulus_omega, ModulusConfig};
use asymod_core::orthopoly;
use asymod_core::translation::{self, default_quad_size, multiplier_eval, Multiplier};
use asymod_core::weighted_space::DEFAULT_NORM_RESOLUTION;
use asymod_core::{Error, JacobiBasis, SampledFunction, WeightedSpace};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_)
        | Error::Domain { .. }
        | Error::Edge { .. }
        | Error::QuadratureSize { .. }
        | Error::UnvalidatedMultiplier => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Accepts a function name or a list of monomial coefficients.
fn function_arg(obj: &Bound<'_, PyAny>, seed: u64) -> PyResult<SampledFunction> {
    if let Ok(name) = obj.extract::<String>() {
        return Ok(TestFunction::parse(&name, seed).map_err(to_py)?.build());
    }
    let coeffs: Vec<f64> = obj
        .extract()
        .map_err(|_| PyValueError::new_err("function must be a name or a list of coefficients"))?;
    if coeffs.is_empty() {
        return Err(PyValueError::new_err("coefficient list is empty"));
    }
    Ok(TestFunction::Monomial(coeffs).build())
}

fn space_arg(p: f64, alpha: f64) -> PyResult<WeightedSpace> {
    WeightedSpace::new(p, alpha).map_err(to_py)
}

/// `P_n^(a,b)(x)` normalized by `P_n(1) = 1`.
#[pyfunction]
#[pyo3(signature = (n, x, a = 2.0, b = 2.0))]
fn jacobi_eval(n: usize, x: f64, a: f64, b: f64) -> PyResult<f64> {
    let basis = JacobiBasis::new(a, b).map_err(to_py)?;
    orthopoly::jacobi_eval(&basis, n, x).map_err(to_py)
}

/// Nodes and weights of the M-point Gauss-Chebyshev rule.
#[pyfunction]
fn gauss_chebyshev(m: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let r = orthopoly::gauss_chebyshev(m).map_err(to_py)?;
    Ok((r.nodes, r.weights))
}

/// Nodes and weights of the M-point Gauss-Legendre rule.
#[pyfunction]
fn gauss_legendre(m: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let r = orthopoly::gauss_legendre(m).map_err(to_py)?;
    Ok((r.nodes, r.weights))
}

/// Violated inequalities of the admissible region; empty when valid.
#[pyfunction]
#[pyo3(signature = (p, alpha, lam = None))]
fn validate_params(p: f64, alpha: f64, lam: Option<f64>) -> PyResult<Vec<String>> {
    let v = asymod_core::validate_params(&space_arg(p, alpha)?, lam);
    Ok(v.violated.iter().map(|c| c.to_string()).collect())
}

#[pyfunction]
#[pyo3(signature = (function, p, alpha, resolution = None, seed = 7))]
fn weighted_norm(
    py: Python<'_>,
    function: &Bound<'_, PyAny>,
    p: f64,
    alpha: f64,
    resolution: Option<usize>,
    seed: u64,
) -> PyResult<f64> {
    let f = function_arg(function, seed)?;
    let space = space_arg(p, alpha)?;
    let res = resolution.unwrap_or(if space.is_sup() {
        4097
    } else {
        DEFAULT_NORM_RESOLUTION
    });
    py.detach(|| asymod_core::weighted_norm(&f, &space, res))
        .map_err(to_py)
}

/// `T_y f(x)`.
#[pyfunction]
#[pyo3(signature = (function, y, x, quad_size = None, seed = 7))]
fn translate(
    function: &Bound<'_, PyAny>,
    y: f64,
    x: f64,
    quad_size: Option<usize>,
    seed: u64,
) -> PyResult<f64> {
    let f = function_arg(function, seed)?;
    let m = quad_size.unwrap_or_else(|| default_quad_size(&f));
    translation::translate(&f, y, x, m).map_err(to_py)
}

/// `R_n(y)` from the shipped calibration.
#[pyfunction]
fn multiplier(n: usize, y: f64) -> PyResult<f64> {
    let m = Multiplier::shipped().map_err(to_py)?;
    multiplier_eval(&m, n, y).map_err(to_py)
}

#[pyclass(get_all, frozen, name = "BestApprox")]
struct PyBestApprox {
    n: usize,
    value: f64,
    /// Chebyshev coefficients.
    coefficients: Vec<f64>,
    solver: String,
    iterations: usize,
    gap: f64,
    converged: bool,
    certified: Option<bool>,
    healthy: bool,
}

#[pymethods]
impl PyBestApprox {
    fn __call__(&self, x: f64) -> f64 {
        asymod_core::numeric::chebyshev_eval(&self.coefficients, x)
    }

    fn __repr__(&self) -> String {
        format!(
            "BestApprox(n={}, value={:e}, solver={})",
            self.n, self.value, self.solver
        )
    }
}

impl From<BestApproxResult> for PyBestApprox {
    fn from(r: BestApproxResult) -> Self {
        let healthy = r.healthy();
        Self {
            n: r.n,
            value: r.value,
            coefficients: r.coefficients,
            solver: r.solver.to_string(),
            iterations: r.iterations,
            gap: r.residual_norm_gap,
            converged: r.converged,
            certified: r.equioscillation.map(|e| e.certified),
            healthy,
        }
    }
}

/// `E_n(f)` and the polynomial attaining it.
#[pyfunction]
#[pyo3(signature = (function, n, p, alpha, seed = 7))]
fn best_approx(
    py: Python<'_>,
    function: &Bound<'_, PyAny>,
    n: usize,
    p: f64,
    alpha: f64,
    seed: u64,
) -> PyResult<PyBestApprox> {
    let f = function_arg(function, seed)?;
    let space = space_arg(p, alpha)?;
    let r = py
        .detach(|| asymod_core::best_approx(&f, n, &space))
        .map_err(to_py)?;
    Ok(r.into())
}

/// `[E_1, ..., E_{n_max}]` with monotonicity flags.
#[pyfunction]
#[pyo3(signature = (function, n_max, p, alpha, seed = 7))]
fn best_approx_seq(
    py: Python<'_>,
    function: &Bound<'_, PyAny>,
    n_max: usize,
    p: f64,
    alpha: f64,
    seed: u64,
) -> PyResult<Vec<PyBestApprox>> {
    let f = function_arg(function, seed)?;
    let space = space_arg(p, alpha)?;
    let seq = py
        .detach(|| best_approx_sequence(&f, n_max, &space))
        .map_err(to_py)?;
    Ok(seq.into_iter().map(Into::into).collect())
}

/// `(omega, argmax_t)`.
#[pyfunction]
#[pyo3(signature = (function, delta, p, alpha, t_grid = 33, quad_size = None, seed = 7))]
#[allow(clippy::too_many_arguments)]
fn modulus(
    py: Python<'_>,
    function: &Bound<'_, PyAny>,
    delta: f64,
    p: f64,
    alpha: f64,
    t_grid: usize,
    quad_size: Option<usize>,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let f = function_arg(function, seed)?;
    let space = space_arg(p, alpha)?;
    let cfg = ModulusConfig {
        t_grid,
        quad_size,
        norm_resolution: None,
    };
    let r = py
        .detach(|| modulus_omega(&f, delta, &space, &cfg))
        .map_err(to_py)?;
    Ok((r.value, r.argmax_t))
}

/// Runs the multiplier calibration; returns the selected candidate (or
/// `None`) and `(candidate, max_residual, matches)` for each candidate.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn calibrate(py: Python<'_>) -> PyResult<(Option<String>, Vec<(String, f64, bool)>)> {
    let report = py.detach(translation::calibrate_default).map_err(to_py)?;
    let rows = report
        .candidates
        .iter()
        .map(|c| (c.candidate.to_string(), c.max_residual, c.matches))
        .collect();
    Ok((
        report
            .selected
            .map(|i| report.candidates[i].candidate.to_string()),
        rows,
    ))
}

/// `(property, name, max_residual, tolerance, passed)` per property.
#[pyfunction]
#[pyo3(signature = (n_max = 20, seed = 7, fault_scale = 1.0))]
#[allow(clippy::type_complexity)]
fn verify_lemma1(
    py: Python<'_>,
    n_max: usize,
    seed: u64,
    fault_scale: f64,
) -> PyResult<Vec<(u8, String, f64, f64, bool)>> {
    let cfg = Lemma1Config {
        n_max,
        seed,
        prefactor_scale: fault_scale,
        ..Lemma1Config::default()
    };
    let m = Multiplier::shipped().map_err(to_py)?;
    let report = py.detach(|| core_verify_lemma1(&cfg, &m)).map_err(to_py)?;
    Ok(report
        .checks
        .into_iter()
        .map(|c| (c.property, c.name, c.max_residual, c.tolerance, c.passed))
        .collect())
}

/// `(n, omega, rhs_sum, ratio)` rows.
#[pyfunction]
#[pyo3(signature = (function, n_list, p, alpha, seed = 7))]
fn converse_table(
    py: Python<'_>,
    function: &Bound<'_, PyAny>,
    n_list: Vec<usize>,
    p: f64,
    alpha: f64,
    seed: u64,
) -> PyResult<Vec<(usize, f64, f64, f64)>> {
    let f = function_arg(function, seed)?;
    let space = space_arg(p, alpha)?;
    let t = py
        .detach(|| core_converse_table(&f, &n_list, &space, &ConverseConfig::default()))
        .map_err(to_py)?;
    Ok(t.rows
        .iter()
        .map(|r| (r.n, r.omega, r.rhs_sum, r.ratio))
        .collect())
}

#[pymodule]
fn asymod(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBestApprox>()?;
    m.add_function(wrap_pyfunction!(jacobi_eval, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_chebyshev, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_legendre, m)?)?;
    m.add_function(wrap_pyfunction!(validate_params, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_norm, m)?)?;
    m.add_function(wrap_pyfunction!(translate, m)?)?;
    m.add_function(wrap_pyfunction!(multiplier, m)?)?;
    m.add_function(wrap_pyfunction!(best_approx, m)?)?;
    m.add_function(wrap_pyfunction!(best_approx_seq, m)?)?;
    m.add_function(wrap_pyfunction!(modulus, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemma1, m)?)?;
    m.add_function(wrap_pyfunction!(converse_table, m)?)?;
    Ok(())
}

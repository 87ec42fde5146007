//! Python bindings for `skyline-core`.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use skyline_core::harness::{self, figure, parse_config_str, run_config, run_figure, write_result, Format, Mode};
use skyline_core::qos::{self, UavPlacement};
use skyline_core::simcore::{estimate_metric, AvailabilityBackend, EstimateOptions, Metric, PlacementSpec};
use skyline_core::{availability, blockage, mathkit, Error, ScenarioParams};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Scenario parameters in SI units. Keyword arguments override the
/// defaults field by field.
#[pyclass(name = "ScenarioParams", module = "skyline", skip_from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: ScenarioParams,
}

fn field_names() -> Vec<String> {
    match serde_json::to_value(ScenarioParams::default()) {
        Ok(serde_json::Value::Object(m)) => m.keys().cloned().collect(),
        _ => Vec::new(),
    }
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p = PyParams {
            inner: ScenarioParams::default(),
        };
        if let Some(kw) = kwargs {
            for (k, v) in kw.iter() {
                p.set(&k.extract::<String>()?, v)?;
            }
        }
        Ok(p)
    }

    /// Parameters of the `scenario` section of a JSON run configuration.
    #[staticmethod]
    fn from_config(text: &str) -> PyResult<Self> {
        Ok(PyParams {
            inner: parse_config_str(text).map_err(py_err)?.params,
        })
    }

    fn __getattr__<'py>(&self, py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
        if name == "k" {
            return Ok(self.inner.k.into_pyobject(py)?.into_any());
        }
        let v = serde_json::to_value(self.inner).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let x = v
            .get(name)
            .and_then(|x| x.as_f64())
            .ok_or_else(|| PyKeyError::new_err(format!("no parameter `{name}`")))?;
        Ok(x.into_pyobject(py)?.into_any())
    }

    fn __setattr__(&mut self, name: &str, value: Bound<'_, PyAny>) -> PyResult<()> {
        self.set(name, value)
    }

    fn fields(&self) -> Vec<String> {
        field_names()
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(py_err)
    }

    fn mean_uav_count(&self) -> f64 {
        self.inner.mean_uav_count()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

impl PyParams {
    fn set(&mut self, name: &str, value: Bound<'_, PyAny>) -> PyResult<()> {
        let mut v = serde_json::to_value(self.inner).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let slot = v
            .get_mut(name)
            .ok_or_else(|| PyKeyError::new_err(format!("no parameter `{name}` (expected one of {:?})", field_names())))?;
        *slot = if name == "k" {
            serde_json::Value::from(value.extract::<usize>()?)
        } else {
            serde_json::Value::from(value.extract::<f64>()?)
        };
        self.inner = serde_json::from_value(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(())
    }
}

fn placements(uavs: Vec<(f64, f64)>) -> Vec<UavPlacement> {
    uavs.into_iter().map(|(r, h)| UavPlacement::new(r, h)).collect()
}

#[pyfunction]
fn marcum_q1(a: f64, b: f64) -> PyResult<f64> {
    mathkit::marcum_q1(a, b).map_err(py_err)
}

#[pyfunction]
fn rician_cdf(d: f64, nu: f64, sigma: f64) -> PyResult<f64> {
    mathkit::rician_cdf(d, nu, sigma).map_err(py_err)
}

#[pyfunction]
fn bessel_i0(x: f64) -> PyResult<f64> {
    mathkit::bessel_i0(x).map_err(py_err)
}

#[pyfunction]
fn erf(x: f64) -> f64 {
    mathkit::erf(x)
}

/// Steady-state probability that a link at height `h`, horizontal
/// distance `r` is cut by a moving blocker.
#[pyfunction]
fn dynamic_blockage_prob(h: f64, r: f64, params: &PyParams) -> PyResult<f64> {
    blockage::dynamic_blockage_prob(h, r, &params.inner).map_err(py_err)
}

/// `(mean, variance)` of the dynamic blockage probability under jitter.
#[pyfunction]
fn phi_moments(mu_r: f64, mu_h: f64, params: &PyParams) -> PyResult<(f64, f64)> {
    let m = blockage::phi_moments(mu_r, mu_h, &params.inner).map_err(py_err)?;
    Ok((m.mu_phi, m.var_phi))
}

#[pyfunction]
fn p_available_exact(params: &PyParams) -> f64 {
    availability::p_available_exact(&params.inner)
}

#[pyfunction]
fn p_available_approx(params: &PyParams) -> f64 {
    availability::p_available_approx(&params.inner)
}

#[pyfunction]
fn rel_single(mu_r: f64, mu_h: f64, params: &PyParams) -> PyResult<f64> {
    qos::rel_single(&UavPlacement::new(mu_r, mu_h), &params.inner).map_err(py_err)
}

#[pyfunction]
fn cov_single(mu_r: f64, mu_h: f64, params: &PyParams) -> PyResult<f64> {
    qos::cov_single(&UavPlacement::new(mu_r, mu_h), &params.inner).map_err(py_err)
}

/// `(value, lower_bound, upper_bound)` for UAVs at `[(mu_r, mu_h), ...]`.
#[pyfunction]
fn rel_multi(uavs: Vec<(f64, f64)>, params: &PyParams) -> PyResult<(f64, Option<f64>, Option<f64>)> {
    let v = qos::rel_multi(&placements(uavs), &params.inner).map_err(py_err)?;
    Ok((v.value, v.lower_bound, v.upper_bound))
}

#[pyfunction]
fn cov_multi(uavs: Vec<(f64, f64)>, params: &PyParams) -> PyResult<(f64, Option<f64>, Option<f64>)> {
    let v = qos::cov_multi(&placements(uavs), &params.inner).map_err(py_err)?;
    Ok((v.value, v.lower_bound, v.upper_bound))
}

/// Ring placements `[(mu_r, mu_h), ...]` spread over `[r_in, r_out]`.
#[pyfunction]
fn ring_placements(r_in: f64, r_out: f64, mu_h: f64, count: usize) -> PyResult<Vec<(f64, f64)>> {
    let v = qos::ring_placements(r_in, r_out, mu_h, count).map_err(py_err)?;
    Ok(v.into_iter().map(|p| (p.mu_r, p.mu_h)).collect())
}

/// Monte Carlo estimate `(mean, 95% half-width)` of a metric.
///
/// The UAV sits at `(mu_r, mu_h)`, or is drawn over the annulus `ring`
/// (a pair of radii) when given.
#[pyfunction]
#[pyo3(signature = (metric, params, mu_r=10.0, mu_h=25.0, ring=None, n_trials=100_000, seed=0, geometric=false))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    metric: &str,
    params: &PyParams,
    mu_r: f64,
    mu_h: f64,
    ring: Option<(f64, f64)>,
    n_trials: u64,
    seed: u64,
    geometric: bool,
) -> PyResult<(f64, f64)> {
    let metric: Metric = metric.parse().map_err(py_err)?;
    let spec = match ring {
        Some((r_in, r_out)) => PlacementSpec::Ring { r_in, r_out, mu_h },
        None => PlacementSpec::single(mu_r, mu_h),
    };
    let opts = EstimateOptions {
        n_trials,
        seed,
        availability: if geometric {
            AvailabilityBackend::Geometric
        } else {
            AvailabilityBackend::Draws
        },
        ..Default::default()
    };
    let p = params.inner;
    let e = py
        .detach(|| estimate_metric(metric, &p, &spec, &opts))
        .map_err(py_err)?;
    Ok((e.mean, e.half_width_95))
}

fn to_csv(result: &harness::SweepResult) -> PyResult<String> {
    let mut buf = Vec::new();
    write_result(result, Format::Csv, &mut buf).map_err(py_err)?;
    String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Runs a JSON run configuration and returns the result as CSV text.
#[pyfunction]
#[pyo3(signature = (text, mode=None))]
fn run(py: Python<'_>, text: &str, mode: Option<&str>) -> PyResult<String> {
    let mut cfg = parse_config_str(text).map_err(py_err)?;
    if let Some(m) = mode {
        cfg.sweep.mode = m.parse().map_err(py_err)?;
    }
    let result = py.detach(|| run_config(&cfg)).map_err(py_err)?;
    to_csv(&result)
}

/// One canned figure (`fig3` .. `fig11`) as CSV text.
#[pyfunction]
#[pyo3(signature = (id, mode="analytic", n_trials=100_000, seed=0))]
fn figure_csv(py: Python<'_>, id: &str, mode: &str, n_trials: u64, seed: u64) -> PyResult<String> {
    let fig = figure(id).map_err(py_err)?;
    let mode: Mode = mode.parse().map_err(py_err)?;
    let opts = EstimateOptions {
        n_trials,
        seed,
        ..Default::default()
    };
    let result = py.detach(|| run_figure(&fig, mode, &opts)).map_err(py_err)?;
    to_csv(&result)
}

#[pymodule]
fn skyline(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add("FIGURE_IDS", harness::FIGURE_IDS.to_vec())?;
    m.add("METRICS", Metric::ALL.iter().map(|x| x.name()).collect::<Vec<_>>())?;
    m.add_function(wrap_pyfunction!(marcum_q1, m)?)?;
    m.add_function(wrap_pyfunction!(rician_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_i0, m)?)?;
    m.add_function(wrap_pyfunction!(erf, m)?)?;
    m.add_function(wrap_pyfunction!(dynamic_blockage_prob, m)?)?;
    m.add_function(wrap_pyfunction!(phi_moments, m)?)?;
    m.add_function(wrap_pyfunction!(p_available_exact, m)?)?;
    m.add_function(wrap_pyfunction!(p_available_approx, m)?)?;
    m.add_function(wrap_pyfunction!(rel_single, m)?)?;
    m.add_function(wrap_pyfunction!(cov_single, m)?)?;
    m.add_function(wrap_pyfunction!(rel_multi, m)?)?;
    m.add_function(wrap_pyfunction!(cov_multi, m)?)?;
    m.add_function(wrap_pyfunction!(ring_placements, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(figure_csv, m)?)?;
    Ok(())
}

//! Python module `pursuit`: environments, visibility, shadows, planning and
//! grid validation. Points are any length-2 sequence of floats; structured
//! results come back as plain dicts and lists.

use std::sync::Arc;
use std::time::Duration;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pursuit_core::geometry::{self, Point};
use pursuit_core::planner::{self, PlanConfig, PlanError};
use pursuit_core::rspeg::{self, Jpc, Solution};
use pursuit_core::sampling::{self, SamplerKind, WebConfig};
use pursuit_core::{fixtures, shadows};
use serde::Serialize;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &impl Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn points(v: Vec<[f64; 2]>) -> Vec<Point> {
    v.into_iter().map(|[x, y]| Point::new(x, y)).collect()
}

fn pairs(v: &[Point]) -> Vec<(f64, f64)> {
    v.iter().map(|p| (p.x, p.y)).collect()
}

/// A validated polygonal environment with holes.
#[pyclass(frozen)]
struct Environment {
    inner: Arc<geometry::Environment>,
}

#[pymethods]
impl Environment {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let env = geometry::Environment::from_json(text).map_err(value_err)?;
        Ok(Environment { inner: Arc::new(env) })
    }

    /// One of the shipped environments, by name.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        let env = fixtures::load(name).ok_or_else(|| value_err(format!("unknown environment {name:?}")))?;
        Ok(Environment { inner: Arc::new(env) })
    }

    #[staticmethod]
    fn fixture_names() -> Vec<&'static str> {
        fixtures::names().collect()
    }

    #[getter]
    fn area(&self) -> f64 {
        self.inner.area()
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon()
    }

    #[getter]
    fn outer(&self) -> Vec<(f64, f64)> {
        pairs(self.inner.outer())
    }

    #[getter]
    fn holes(&self) -> Vec<Vec<(f64, f64)>> {
        self.inner.holes().iter().map(|h| pairs(h)).collect()
    }

    fn contains_point(&self, p: [f64; 2]) -> bool {
        self.inner.contains_point(Point::new(p[0], p[1]))
    }

    fn contains_segment(&self, a: [f64; 2], b: [f64; 2]) -> bool {
        self.inner.contains_segment(Point::new(a[0], a[1]), Point::new(b[0], b[1]))
    }

    /// Boundary of the region visible from `q`, counter-clockwise.
    fn visibility_polygon(&self, q: [f64; 2]) -> PyResult<Vec<(f64, f64)>> {
        let v = geometry::visibility_polygon(&self.inner, Point::new(q[0], q[1])).map_err(value_err)?;
        Ok(pairs(&v.boundary))
    }

    /// Shadows of a team as a list of `{"area": float, "rings": [[(x, y), ...], ...]}`.
    fn shadows(&self, py: Python<'_>, team: Vec<[f64; 2]>) -> PyResult<Py<PyAny>> {
        #[derive(Serialize)]
        struct Out {
            area: f64,
            rings: Vec<Vec<Point>>,
        }
        let set = geometry::shadow_set(&self.inner, &points(team)).map_err(value_err)?;
        let out: Vec<Out> = set
            .shadows
            .iter()
            .map(|s| Out { area: s.region.area(), rings: s.region.rings().map(|r| r.to_vec()).collect() })
            .collect();
        to_py(py, &out)
    }

    fn __repr__(&self) -> String {
        format!("Environment(area={:.4}, holes={})", self.inner.area(), self.inner.holes().len())
    }
}

fn sampler_kind(name: &str) -> PyResult<SamplerKind> {
    match name {
        "rcs" => Ok(SamplerKind::Rcs),
        "ws" => Ok(SamplerKind::Ws),
        _ => Err(value_err(format!("sampler must be \"rcs\" or \"ws\", got {name:?}"))),
    }
}

/// Plans a strategy that clears the environment even if any one pursuer
/// fails. Returns a dict with `outcome`, `solution`, `check` and `stats`.
#[pyfunction]
#[pyo3(signature = (env, n, sampler = "rcs", seed = 0, timeout = 600.0, caching = true))]
fn plan(
    py: Python<'_>,
    env: &Environment,
    n: usize,
    sampler: &str,
    seed: u64,
    timeout: f64,
    caching: bool,
) -> PyResult<Py<PyAny>> {
    if !(timeout > 0.0 && timeout.is_finite()) {
        return Err(value_err(format!("timeout must be positive, got {timeout}")));
    }
    let cfg = PlanConfig {
        sampler: sampler_kind(sampler)?,
        seed,
        timeout: Duration::from_secs_f64(timeout),
        caching,
        ..PlanConfig::new(n)
    };
    let env = env.inner.clone();
    let result = py.detach(move || planner::plan(env, &cfg));
    match result {
        Ok(r) => to_py(py, &r),
        Err(e @ (PlanError::InvalidConfig(_) | PlanError::Sampling(_))) => Err(value_err(e)),
        Err(e) => Err(PyRuntimeError::new_err(e.to_string())),
    }
}

/// Re-simulates `waypoints` (a list of joint configurations) on the grid for
/// the full team and every team with one pursuer removed.
#[pyfunction]
fn check_solution(py: Python<'_>, env: &Environment, waypoints: Vec<Vec<[f64; 2]>>) -> PyResult<Py<PyAny>> {
    let sol = Solution { waypoints: waypoints.into_iter().map(|w| Jpc::new(points(w))).collect() };
    let env = env.inner.clone();
    let report = py.detach(move || rspeg::check_solution(&env, &sol)).map_err(value_err)?;
    to_py(py, &report)
}

/// Reachability matrix between shadows at `start` and shadows at `end` when
/// every pursuer moves along a straight line.
#[pyfunction]
fn influence_relation(env: &Environment, start: Vec<[f64; 2]>, end: Vec<[f64; 2]>) -> PyResult<Vec<Vec<bool>>> {
    let rel = shadows::influence_relation(&env.inner, &points(start), &points(end)).map_err(value_err)?;
    Ok(rel.to_matrix())
}

/// Web points, visibility graph and depth-first walk for one seed.
#[pyfunction]
#[pyo3(signature = (env, seed = 0))]
fn web_walk(py: Python<'_>, env: &Environment, seed: u64) -> PyResult<Py<PyAny>> {
    let ww = sampling::build_web_walk(&env.inner, seed, &WebConfig::default()).map_err(value_err)?;
    to_py(py, &ww)
}

#[pymodule]
fn pursuit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Environment>()?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(check_solution, m)?)?;
    m.add_function(wrap_pyfunction!(influence_relation, m)?)?;
    m.add_function(wrap_pyfunction!(web_walk, m)?)?;
    Ok(())
}

//! Python bindings: a thin layer over the core solvers and the experiment runner.
//!
//! Shapes are named by preset (`experiment-ellipse`, `sfm-kite`, ...), angles
//! are in radians and amplitudes are returned as Python complex numbers.

use std::fmt::Display;
use std::path::Path;

use helmscat_cli::config::{ShapeSpec, BUNDLED};
use helmscat_core::biem::BiemSolver;
use helmscat_core::farfield::AmplitudeSource;
use helmscat_core::geometry::{interior_poles, Boundary, GratingProfile, ProfileKind, RectGrid, Vec2};
use helmscat_core::grating::{solve_grating, GratingProblem};
use helmscat_core::lsm::{scan, FarFieldMatrix};
use helmscat_core::mrc::MrcSolver;
use helmscat_core::oracles::{BoundaryCondition, CircleScatterer};
use helmscat_core::sfm::{recover_support_curve, DEFAULT_BRACKET};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn preset(name: &str) -> PyResult<Boundary> {
    ShapeSpec::Preset { name: name.to_string() }.build("shape").map_err(err)
}

fn amplitudes<S: AmplitudeSource>(source: &S, incident: f64, observation: &[f64]) -> PyResult<Vec<Complex64>> {
    let dirs: Vec<Vec2> = observation.iter().map(|&t| Vec2::polar(t)).collect();
    source.amplitudes(&dirs, Vec2::polar(incident)).map_err(err)
}

/// Exact circle amplitudes; Dirichlet unless a Robin parameter `h` is given.
#[pyfunction]
#[pyo3(signature = (center, radius, k, incident, observation, h = None))]
fn circle_far_field(
    center: (f64, f64),
    radius: f64,
    k: f64,
    incident: f64,
    observation: Vec<f64>,
    h: Option<f64>,
) -> PyResult<Vec<Complex64>> {
    let condition = h.map_or(BoundaryCondition::Dirichlet, |h| BoundaryCondition::Robin { h });
    let series = CircleScatterer::new(Vec2::new(center.0, center.1), radius, condition)
        .and_then(|s| s.series(k))
        .map_err(err)?;
    amplitudes(&series, incident, &observation)
}

/// Boundary-integral amplitudes for a smooth Dirichlet preset shape.
#[pyfunction]
#[pyo3(signature = (shape, k, incident, observation, n = 64))]
fn biem_far_field(shape: &str, k: f64, incident: f64, observation: Vec<f64>, n: usize) -> PyResult<Vec<Complex64>> {
    let solver = BiemSolver::new(&preset(shape)?, k, n).map_err(err)?;
    amplitudes(&solver, incident, &observation)
}

/// Multipole least-squares solve; returns `r_min`, `rank`, `poles`,
/// `coefficients` and the amplitudes at `observation`.
#[pyfunction]
#[pyo3(signature = (shape, k, incident, observation = Vec::new(), pole_count = 16, pole_scale = 0.9, order = 5, knots = 720, w_min = 1e-8))]
#[allow(clippy::too_many_arguments)]
fn mrc_solve<'py>(
    py: Python<'py>,
    shape: &str,
    k: f64,
    incident: f64,
    observation: Vec<f64>,
    pole_count: usize,
    pole_scale: f64,
    order: usize,
    knots: usize,
    w_min: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let b = preset(shape)?;
    let poles = interior_poles(&b, pole_count, pole_scale).map_err(err)?;
    let solver = MrcSolver::new(&b, k, order, &poles, knots, w_min).map_err(err)?;
    let (e, sol) = solver.solve(Vec2::polar(incident), 0.0).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("r_min", sol.r_min)?;
    out.set_item("rank", sol.rank_used)?;
    out.set_item("poles", poles.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>())?;
    out.set_item("coefficients", e.coefficients.clone())?;
    out.set_item("far_field", observation.iter().map(|&t| e.far_field(Vec2::polar(t))).collect::<Vec<_>>())?;
    Ok(out)
}

fn profile_kind(name: &str) -> PyResult<ProfileKind> {
    match name {
        "sine2x" => Ok(ProfileKind::Sine2x),
        "sine-slow" => Ok(ProfileKind::SineSlow),
        "tent" => Ok(ProfileKind::Tent),
        "sawtooth" => Ok(ProfileKind::Sawtooth),
        "flat" => Ok(ProfileKind::Flat),
        other => Err(err(format!("unknown profile `{other}`; use sine2x, sine-slow, tent, sawtooth or flat"))),
    }
}

/// Normalized residual of the grating multipole solve.
#[pyfunction]
#[pyo3(signature = (profile, period, k, theta, nodes = 256, poles = 64, w_min = 1e-8, jmax = 120, b_depth = 1.2))]
#[allow(clippy::too_many_arguments)]
fn grating_residual(
    profile: &str,
    period: f64,
    k: f64,
    theta: f64,
    nodes: usize,
    poles: usize,
    w_min: f64,
    jmax: usize,
    b_depth: f64,
) -> PyResult<f64> {
    let p = GratingProfile::new(profile_kind(profile)?, period).map_err(err)?;
    let g = GratingProblem::new(p, k, theta, b_depth, jmax).map_err(err)?;
    Ok(solve_grating(&g, nodes, poles, w_min, 0.0, false).map_err(err)?.r_min)
}

/// Support values `(t, d)` of a Dirichlet circle recovered from exact amplitudes.
#[pyfunction]
#[pyo3(signature = (center, radius, k, directions = 16, pairs = 12))]
fn sfm_circle_support(center: (f64, f64), radius: f64, k: f64, directions: usize, pairs: usize) -> PyResult<Vec<(f64, f64)>> {
    let series = CircleScatterer::dirichlet(Vec2::new(center.0, center.1), radius)
        .and_then(|s| s.series(k))
        .map_err(err)?;
    let s = recover_support_curve(&series, directions, pairs, DEFAULT_BRACKET).map_err(err)?;
    Ok(s.angles.into_iter().zip(s.d_values).collect())
}

/// Linear sampling scan of a Dirichlet circle; returns the grid coordinates,
/// both `log10 ||zeta||` fields and their minimizers.
#[pyfunction]
#[pyo3(signature = (center, radius, k, grid_center, side, points, n = 128, cutoff_ratio = 1e-12))]
#[allow(clippy::too_many_arguments)]
fn lsm_circle_scan<'py>(
    py: Python<'py>,
    center: (f64, f64),
    radius: f64,
    k: f64,
    grid_center: (f64, f64),
    side: f64,
    points: usize,
    n: usize,
    cutoff_ratio: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let series = CircleScatterer::dirichlet(Vec2::new(center.0, center.1), radius)
        .and_then(|s| s.series(k))
        .map_err(err)?;
    let m = FarFieldMatrix::from_source(&series, n).map_err(err)?;
    let grid = RectGrid::square(Vec2::new(grid_center.0, grid_center.1), side, points);
    let s = scan(&m, &grid, cutoff_ratio).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("x", grid.points().map(|p| p.x).collect::<Vec<_>>())?;
    out.set_item("y", grid.points().map(|p| p.y).collect::<Vec<_>>())?;
    out.set_item("log_ck", s.values_ck.clone())?;
    out.set_item("log_k", s.values_k.clone())?;
    let (a, b) = (s.argmin_ck(), s.argmin_kirsch());
    out.set_item("argmin_ck", (a.x, a.y))?;
    out.set_item("argmin_kirsch", (b.x, b.y))?;
    Ok(out)
}

/// Names of the configs shipped with the experiment runner.
#[pyfunction]
fn bundled_configs() -> Vec<String> {
    BUNDLED.iter().map(|(n, _)| n.to_string()).collect()
}

/// Runs a config file or bundled config into `out_dir`; returns the manifest as JSON text.
#[pyfunction]
fn run_config(config: &str, out_dir: &str) -> PyResult<String> {
    let loaded = helmscat_cli::load(config).map_err(err)?;
    let manifest = helmscat_cli::execute(&loaded, Path::new(out_dir)).map_err(err)?;
    serde_json::to_string(&manifest).map_err(err)
}

#[pymodule]
pub fn helmscat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(circle_far_field, m)?)?;
    m.add_function(wrap_pyfunction!(biem_far_field, m)?)?;
    m.add_function(wrap_pyfunction!(mrc_solve, m)?)?;
    m.add_function(wrap_pyfunction!(grating_residual, m)?)?;
    m.add_function(wrap_pyfunction!(sfm_circle_support, m)?)?;
    m.add_function(wrap_pyfunction!(lsm_circle_scan, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_configs, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}

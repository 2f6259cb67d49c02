//! Python bindings: Lie-algebra invariants, the Kaluza-Klein geometry
//! pipeline, the exact-solution builders with their residuals, fibration
//! diagnostics, and the check-suite runner.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use kkcheck_core::chart::Chart;
use kkcheck_core::fibration;
use kkcheck_core::frame::CoFrame;
use kkcheck_core::lie;
use kkcheck_core::reduced::ReducedFrame;
use kkcheck_core::report;
use kkcheck_core::variational::{eym, maxwell};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn algebra(group: &str) -> PyResult<lie::LieAlgebra> {
    Ok(report::Group::parse(group).map_err(err)?.algebra())
}

/// Jacobi, unimodularity and ad-invariance residuals plus the Killing
/// contraction of a catalog algebra.
#[pyfunction]
fn lie_invariants<'py>(py: Python<'py>, group: &str) -> PyResult<Bound<'py, PyDict>> {
    let alg = algebra(group)?;
    let d = PyDict::new(py);
    d.set_item("dim", alg.dim)?;
    d.set_item("jacobi", lie::jacobi_residual(&alg))?;
    d.set_item("unimodularity", lie::unimodularity_residual(&alg))?;
    d.set_item("ad_invariance", lie::ad_invariance_residual(&alg))?;
    d.set_item(
        "killing_contraction",
        lie::killing_contraction(&alg).map_err(err)?,
    )?;
    Ok(d)
}

/// Killing form of a catalog algebra as a nested list.
#[pyfunction]
fn killing_form(group: &str) -> PyResult<Vec<Vec<f64>>> {
    Ok(lie::killing_form(&algebra(group)?))
}

/// Effective cosmological constant `Lambda_0 + <B, k>/4`.
#[pyfunction]
fn lambda_effective(lambda0: f64, group: &str) -> PyResult<f64> {
    kkcheck_core::reduced::lambda_effective(lambda0, &algebra(group)?).map_err(err)
}

/// Mixed Einstein tensor of the flat product metric on `R^4 x G`.
#[pyfunction]
fn flat_einstein_blocks(group: &str) -> PyResult<Vec<Vec<f64>>> {
    let red = ReducedFrame::flat(algebra(group)?).map_err(err)?;
    let ein = red.einstein_full_at(&[0.0; 4], 3);
    Ok(ein
        .ein_mixed
        .iter()
        .map(|row| row.iter().map(|j| j.v).collect())
        .collect())
}

/// Max Euler-Lagrange residuals of the circle-model solution with field
/// strength `b`, sampled at `samples` seeded points.
#[pyfunction]
fn maxwell_solution_residuals<'py>(
    py: Python<'py>,
    b: f64,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let f = maxwell::build_maxwell_solution(b);
    let op = maxwell::MaxwellElOperator::new(&f);
    let mut rng = Chart::rng(seed);
    let mut res = [0.0_f64; 3];
    for _ in 0..samples.max(1) {
        let z = f.chart.sample(&mut rng);
        let r = op.at(&z);
        res[0] = res[0].max(r.res_a);
        res[1] = res[1].max(r.res_b);
        res[2] = res[2].max(r.res_c);
    }
    let d = PyDict::new(py);
    d.set_item("theta_mixed", res[0])?;
    d.set_item("momentum_pairing", res[1])?;
    d.set_item("momentum_divergence", res[2])?;
    Ok(d)
}

/// Max Euler-Lagrange residuals of the Einstein-Yang-Mills vacuum solution
/// on `R^4 x SU(2)` with `Lambda_0 = 3/4`.
#[pyfunction]
fn eym_vacuum_residuals<'py>(
    py: Python<'py>,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let red = ReducedFrame::flat(lie::LieAlgebra::su2()).map_err(err)?;
    let vac = eym::build_eym_vacuum_solution(&red);
    let op = eym::EymElOperator::new(&red, &vac);
    let mut rng = Chart::rng(seed);
    let mut worst = [0.0_f64; 4];
    let mut route = 0.0_f64;
    for _ in 0..samples.max(1) {
        let x = red.chart.sample_interior(&mut rng, 0.02);
        let r = op.at(&red, &vac, &x).map_err(err)?;
        worst[0] = worst[0].max(r.res_a);
        worst[1] = worst[1].max(r.res_b);
        worst[2] = worst[2].max(r.res_c);
        worst[3] = worst[3].max(r.res_d);
        route = route.max(r.torsion_route_deviation);
    }
    let d = PyDict::new(py);
    d.set_item("structure_mixed", worst[0])?;
    d.set_item("structure_vertical", worst[1])?;
    d.set_item("torsion", worst[2])?;
    d.set_item("momentum_divergence", worst[3])?;
    d.set_item("torsion_route_deviation", route)?;
    Ok(d)
}

/// Detect the fiber period of a circle-model solution coframe.
#[pyfunction]
fn detect_fiber_period(b: f64, horizon: f64, eps: f64) -> PyResult<Option<f64>> {
    let frame: CoFrame = maxwell::solution_coframe(b);
    let start = [0.0, 0.0, 0.0, 0.0, 0.0];
    match fibration::detect_closure(&frame, &start, horizon, eps, 1e-10).map_err(err)? {
        fibration::ClosureStatus::Closed { period, .. } => Ok(Some(period)),
        fibration::ClosureStatus::NotClosedWithinHorizon { .. } => Ok(None),
    }
}

/// Fiber flux of the circle-model solution at a base point.
#[pyfunction]
fn fiber_flux(b: f64, x: [f64; 4], nodes: usize) -> PyResult<f64> {
    let frame = maxwell::solution_coframe(b);
    fibration::fiber_flux(&frame, &x, nodes).map_err(err)
}

/// Run a named verification suite; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (suite, group = "su2", seed = 0, tol = None, samples = 100))]
fn run_suite(
    suite: &str,
    group: &str,
    seed: u64,
    tol: Option<f64>,
    samples: usize,
) -> PyResult<String> {
    let cfg = report::SuiteConfig {
        suite: report::Suite::parse(suite).map_err(err)?,
        group: report::Group::parse(group).map_err(err)?,
        seed,
        tol,
        samples,
    };
    let r = report::run_suite(&cfg).map_err(err)?;
    Ok(r.to_json())
}

#[pymodule]
fn kkcheck_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(lie_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(killing_form, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_effective, m)?)?;
    m.add_function(wrap_pyfunction!(flat_einstein_blocks, m)?)?;
    m.add_function(wrap_pyfunction!(maxwell_solution_residuals, m)?)?;
    m.add_function(wrap_pyfunction!(eym_vacuum_residuals, m)?)?;
    m.add_function(wrap_pyfunction!(detect_fiber_period, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_flux, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("ENGINE_VERSION", report::ENGINE_VERSION)?;
    Ok(())
}

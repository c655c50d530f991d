//! Python bindings: JSON in, JSON or plain numbers out.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use entireops::borel::{polya_reconstruct, BorelRational, QuadratureSpec};
use entireops::config::ExperimentConfig;
use entireops::operators::{apply_operator, OperatorSequence};
use entireops::report::{run_command, Command};
use entireops::series::{FunctionExpr, TaylorPoly};
use entireops::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::InvalidArgument(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(format!("{what}: {e}")))
}

/// Runs a CLI command on a config document; returns `(exit_code, report_json)`.
#[pyfunction]
fn run(command: &str, config_json: &str) -> PyResult<(i32, String)> {
    let cmd: Command = command.parse().map_err(to_py)?;
    let cfg = ExperimentConfig::from_json(config_json).map_err(to_py)?;
    let rep = run_command(cmd, &cfg).map_err(to_py)?;
    let json = serde_json::to_string(&rep).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((rep.exit_code, json))
}

/// Zeros of `Phi_n` inside `|t| = radius`, counted by the argument principle.
#[pyfunction]
#[pyo3(signature = (expr_json, n, radius))]
fn winding_number(expr_json: &str, n: usize, radius: f64) -> PyResult<i64> {
    let expr: FunctionExpr = parse("expression", expr_json)?;
    entireops::criterion::winding_number(&expr, n, radius, &QuadratureSpec::default()).map_err(to_py)
}

/// `P(z)` rebuilt from its Borel transform on the circle `|t| = radius`.
#[pyfunction]
#[pyo3(signature = (coeffs, z, radius = 1.0))]
fn polya(coeffs: Vec<Complex64>, z: Complex64, radius: f64) -> PyResult<Complex64> {
    let b = BorelRational::new(&TaylorPoly::new(coeffs)).map_err(to_py)?;
    let q = QuadratureSpec::default().with_radius(radius);
    Ok(polya_reconstruct(&b, &q, z).map_err(to_py)?.value)
}

/// Taylor coefficients of `Phi_n(D) P`.
#[pyfunction]
fn apply(sequence_json: &str, n: usize, coeffs: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let seq: OperatorSequence = parse("sequence", sequence_json)?;
    Ok(apply_operator(&seq, n, &TaylorPoly::new(coeffs)).map_err(to_py)?.coeffs)
}

/// A shipped fixture config as JSON.
#[pyfunction]
fn fixture(name: &str) -> PyResult<String> {
    entireops::catalog::fixtures()
        .into_iter()
        .find(|(n, _)| *n == name || n.trim_end_matches(".json") == name)
        .map(|(_, cfg)| cfg.to_json())
        .ok_or_else(|| PyValueError::new_err(format!("unknown fixture `{name}`")))
}

#[pymodule]
fn entireops_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(winding_number, m)?)?;
    m.add_function(wrap_pyfunction!(polya, m)?)?;
    m.add_function(wrap_pyfunction!(apply, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    Ok(())
}

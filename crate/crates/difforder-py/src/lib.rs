//! Python bindings for the classifier: parse systems, apply the field,
//! walk the derivative chain, classify with explicit bounds, and
//! re-verify previously produced reports.
//!
//! All exact values cross the boundary as canonical expression strings;
//! malformed input surfaces as `ValueError` with a line/column message.

use difforder::classifier::{classify, SearchBounds};
use difforder::parse::{parse_ratfunc, parse_system, ParseError};
use difforder::report::{build_report, from_json, reverify, to_json};
use difforder::vectorfield::{BChain, VectorField};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(e: ParseError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[allow(clippy::too_many_arguments)]
fn bounds(
    max_degree: u32,
    max_n: i64,
    max_denom_power: u32,
    darboux_degree: u32,
    cofactor_height: u64,
    series_order: u32,
    trials: u32,
    seed: u64,
) -> SearchBounds {
    SearchBounds {
        num_deg: max_degree,
        n_range: max_n,
        max_denom_power,
        darboux_deg: darboux_degree,
        cofactor_height,
        series_order,
        trials,
        seed,
    }
}

fn report_json(field: &VectorField, b: &SearchBounds) -> String {
    let out = classify(field, b);
    to_json(&build_report(field, b, &out))
}

/// A planar polynomial system `x1' = X1, x2' = X2`.
#[pyclass]
struct System {
    field: VectorField,
}

#[pymethods]
impl System {
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        Ok(System {
            field: parse_system(source).map_err(value_err)?,
        })
    }

    fn __str__(&self) -> String {
        self.field.to_string()
    }

    fn __repr__(&self) -> String {
        format!("System({:?})", self.field.to_string())
    }

    /// First component, as a canonical polynomial string.
    #[getter]
    fn x1(&self) -> String {
        self.field.x1().to_string()
    }

    /// Second component, as a canonical polynomial string.
    #[getter]
    fn x2(&self) -> String {
        self.field.x2().to_string()
    }

    /// Applies the field `X1*d1 + X2*d2` to a rational expression.
    fn apply(&self, expr: &str) -> PyResult<String> {
        let f = parse_ratfunc(expr).map_err(value_err)?;
        Ok(self.field.apply(&f).to_string())
    }

    /// The `i`-th derivative-chain term `b_i`, as a canonical string.
    fn chain(&self, i: usize) -> String {
        BChain::new(&self.field).get(i).to_string()
    }

    /// Order label for this system: `"0"`..`"3"` once a witness is
    /// verified, otherwise `"at_least_4_within_bounds"`.
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (*, max_degree=8, max_n=4, max_denom_power=4,
        darboux_degree=4, cofactor_height=2, series_order=8, trials=20, seed=1))]
    fn verdict(
        &self,
        max_degree: u32,
        max_n: i64,
        max_denom_power: u32,
        darboux_degree: u32,
        cofactor_height: u64,
        series_order: u32,
        trials: u32,
        seed: u64,
    ) -> String {
        let b = bounds(
            max_degree,
            max_n,
            max_denom_power,
            darboux_degree,
            cofactor_height,
            series_order,
            trials,
            seed,
        );
        classify(&self.field, &b).verdict.label()
    }

    /// Full classification report as a JSON string (schema `v1`).
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (*, max_degree=8, max_n=4, max_denom_power=4,
        darboux_degree=4, cofactor_height=2, series_order=8, trials=20, seed=1))]
    fn classify_json(
        &self,
        max_degree: u32,
        max_n: i64,
        max_denom_power: u32,
        darboux_degree: u32,
        cofactor_height: u64,
        series_order: u32,
        trials: u32,
        seed: u64,
    ) -> String {
        let b = bounds(
            max_degree,
            max_n,
            max_denom_power,
            darboux_degree,
            cofactor_height,
            series_order,
            trials,
            seed,
        );
        report_json(&self.field, &b)
    }
}

/// Classifies a system given as source text; returns the report JSON.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (source, *, max_degree=8, max_n=4, max_denom_power=4,
    darboux_degree=4, cofactor_height=2, series_order=8, trials=20, seed=1))]
fn classify_json(
    source: &str,
    max_degree: u32,
    max_n: i64,
    max_denom_power: u32,
    darboux_degree: u32,
    cofactor_height: u64,
    series_order: u32,
    trials: u32,
    seed: u64,
) -> PyResult<String> {
    let field = parse_system(source).map_err(value_err)?;
    let b = bounds(
        max_degree,
        max_n,
        max_denom_power,
        darboux_degree,
        cofactor_height,
        series_order,
        trials,
        seed,
    );
    Ok(report_json(&field, &b))
}

/// Order label for a system given as source text.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (source, *, max_degree=8, max_n=4, max_denom_power=4,
    darboux_degree=4, cofactor_height=2, series_order=8, trials=20, seed=1))]
fn verdict(
    source: &str,
    max_degree: u32,
    max_n: i64,
    max_denom_power: u32,
    darboux_degree: u32,
    cofactor_height: u64,
    series_order: u32,
    trials: u32,
    seed: u64,
) -> PyResult<String> {
    let field = parse_system(source).map_err(value_err)?;
    let b = bounds(
        max_degree,
        max_n,
        max_denom_power,
        darboux_degree,
        cofactor_height,
        series_order,
        trials,
        seed,
    );
    Ok(classify(&field, &b).verdict.label())
}

/// Re-runs every exact check recorded in a report JSON string; `True`
/// exactly when all certificates still hold.
#[pyfunction]
fn reverify_json(report: &str) -> PyResult<bool> {
    let doc = from_json(report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    reverify(&doc).map_err(value_err)
}

#[pymodule]
fn difforder_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_function(wrap_pyfunction!(classify_json, m)?)?;
    m.add_function(wrap_pyfunction!(verdict, m)?)?;
    m.add_function(wrap_pyfunction!(reverify_json, m)?)?;
    Ok(())
}

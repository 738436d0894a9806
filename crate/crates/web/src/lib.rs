//! Browser bindings for a few interactive operations of `cbnorm-core`.
//!
//! Each operation is a plain function returning JSON text, wrapped by a
//! `#[wasm_bindgen]` export that turns errors into JavaScript exceptions.

use cbnorm_core::dilation::{compress_12, dilate};
use cbnorm_core::experiments::cb_gap_experiment;
use cbnorm_core::formats::{matrix_from_json, matrix_to_json};
use cbnorm_core::linalg::operator_norm;
use cbnorm_core::norms::pisier_bound;
use cbnorm_core::{OptimizerConfig, Seed};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Runs the max/min comparison at level `p` and returns the report as JSON.
pub fn cb_gap_report(
    n: usize,
    p: usize,
    trials: usize,
    restarts: usize,
    seed: u64,
) -> Result<String, String> {
    let cfg = OptimizerConfig {
        restarts,
        ..OptimizerConfig::default()
    };
    let report = cb_gap_experiment(n, p, trials, p, &cfg, Seed(seed)).map_err(|e| e.to_string())?;
    report.recertify().map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Dilates a contraction given as `{rows, cols, entries}` JSON.
pub fn dilation_report(matrix_json: &str) -> Result<String, String> {
    let a = matrix_from_json(matrix_json).map_err(|e| e.to_string())?;
    let d = dilate(&a).map_err(|e| e.to_string())?;
    let exact = compress_12(&d.result).map_err(|e| e.to_string())? == d.source;
    let dilation: serde_json::Value =
        serde_json::from_str(&matrix_to_json(&d.result).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    Ok(json!({
        "source_norm": operator_norm(&d.source),
        "unitarity_residual": d.unitarity_residual(),
        "compression_exact": exact,
        "dilation": dilation,
    })
    .to_string())
}

/// `[[n, n/(2√(n−1))], ...]` for `n = 2..=n_max`.
pub fn pisier_curve_points(n_max: u32) -> Result<String, String> {
    let points = (2..=u64::from(n_max))
        .map(|n| pisier_bound(n).map(|b| (n, b)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = cbGap)]
pub fn cb_gap(
    n: usize,
    p: usize,
    trials: usize,
    restarts: usize,
    seed: u64,
) -> Result<String, JsError> {
    cb_gap_report(n, p, trials, restarts, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = dilateMatrix)]
pub fn dilate_matrix(matrix_json: &str) -> Result<String, JsError> {
    dilation_report(matrix_json).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pisierCurve)]
pub fn pisier_curve(n_max: u32) -> Result<String, JsError> {
    pisier_curve_points(n_max).map_err(|e| JsError::new(&e))
}

//! Browser bindings for three interactive views: density curves, the
//! single-parameter ratio as a function of shape, and sample-then-fit.
//!
//! Each view is a plain function returning a JSON string so it can be tested
//! natively; the `#[wasm_bindgen]` wrappers only convert errors.

use momentmono_core::distributions::{pdf, root_moment, sample};
use momentmono_core::estimation::{fit_from_data, SampleMoments};
use momentmono_core::ratio::{log_ratio, log_ratio_derivative};
use momentmono_core::verification::log_spaced;
use momentmono_core::{BisectionConfig, DistributionParams, Family, OrderPair};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest grid or sample the page may request.
pub const MAX_POINTS: usize = 4_000;
pub const MAX_SAMPLE: usize = 1_000_000;

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn params(family: &str, shape: f64, nuisance: f64) -> Result<DistributionParams, String> {
    let family: Family = family.parse().map_err(err)?;
    DistributionParams::from_shape_nuisance(family, shape, nuisance).map_err(err)
}

fn check_points(points: usize) -> Result<(), String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be between 2 and {MAX_POINTS}"));
    }
    Ok(())
}

/// Density on `[0, x_max]` plus the first six root moments, which the page
/// draws as markers on the x axis.
pub fn pdf_curve_json(
    family: &str,
    shape: f64,
    nuisance: f64,
    x_max: f64,
    points: usize,
) -> Result<String, String> {
    let p = params(family, shape, nuisance)?;
    check_points(points)?;
    if !(x_max.is_finite() && x_max > 0.0) {
        return Err("x_max must be positive".into());
    }
    let x: Vec<f64> = (0..points)
        .map(|j| x_max * j as f64 / (points - 1) as f64)
        .collect();
    let density: Vec<f64> = x
        .iter()
        .map(|&xi| pdf(&p, xi).map_err(err))
        .collect::<Result<_, _>>()?;
    let roots: Vec<Option<f64>> = (1..=6).map(|i| root_moment(&p, f64::from(i)).ok()).collect();
    Ok(json!({ "params": p, "x": x, "pdf": density, "root_moments": roots }).to_string())
}

/// `ln R` (or `ln G`) and its shape derivative over a log-spaced shape grid.
pub fn ratio_curve_json(
    family: &str,
    n: f64,
    m: f64,
    shape_min: f64,
    shape_max: f64,
    points: usize,
) -> Result<String, String> {
    let family: Family = family.parse().map_err(err)?;
    let orders = OrderPair::new(n, m).map_err(err)?;
    check_points(points)?;
    let shapes = log_spaced(shape_min, shape_max, points).map_err(err)?;
    let mut values = Vec::with_capacity(points);
    let mut slopes = Vec::with_capacity(points);
    for &s in &shapes {
        values.push(log_ratio(family, s, orders).map_err(err)?);
        slopes.push(log_ratio_derivative(family, s, orders).map_err(err)?);
    }
    Ok(json!({
        "family": family,
        "orders": { "n": n, "m": m },
        "shape": shapes,
        "log_ratio": values,
        "derivative": slopes,
    })
    .to_string())
}

/// Draws a seeded sample and fits the same family back with orders (2, 1).
pub fn sample_and_fit_json(
    family: &str,
    shape: f64,
    nuisance: f64,
    count: usize,
    seed: u64,
) -> Result<String, String> {
    let truth = params(family, shape, nuisance)?;
    if !(2..=MAX_SAMPLE).contains(&count) {
        return Err(format!("count must be between 2 and {MAX_SAMPLE}"));
    }
    let data = sample(&truth, count, seed).map_err(err)?;
    let orders = OrderPair::default();
    let moments = SampleMoments::from_data(&data, orders).map_err(err)?;
    let fit = fit_from_data(&data, truth.family(), orders, &BisectionConfig::default()).map_err(err)?;
    Ok(json!({
        "truth": truth,
        "fit": fit,
        "sample_moments": moments,
    })
    .to_string())
}

#[wasm_bindgen(js_name = pdfCurve)]
pub fn pdf_curve(
    family: &str,
    shape: f64,
    nuisance: f64,
    x_max: f64,
    points: u32,
) -> Result<String, JsValue> {
    pdf_curve_json(family, shape, nuisance, x_max, points as usize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = ratioCurve)]
pub fn ratio_curve(
    family: &str,
    n: f64,
    m: f64,
    shape_min: f64,
    shape_max: f64,
    points: u32,
) -> Result<String, JsValue> {
    ratio_curve_json(family, n, m, shape_min, shape_max, points as usize)
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = sampleAndFit)]
pub fn sample_and_fit(
    family: &str,
    shape: f64,
    nuisance: f64,
    count: u32,
    seed: u32,
) -> Result<String, JsValue> {
    sample_and_fit_json(family, shape, nuisance, count as usize, u64::from(seed))
        .map_err(|e| JsValue::from_str(&e))
}

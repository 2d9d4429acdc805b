//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes plain numbers and returns a JSON string, so the page
//! needs no generated TypeScript types.

use laser_noise::sweeps::{self, Column};
use laser_noise::{model, noise, report, DeviceParams, MaterialConstants, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn device(beta: f64, nt: f64, tau_sp: f64, tau_cav: f64) -> Result<DeviceParams> {
    DeviceParams::new(beta, nt, tau_sp, tau_cav)
}

/// Thresholds, regime and noise threshold of one device.
pub fn summary_json(d: &DeviceParams) -> Result<Value> {
    Ok(json!({
        "thresholds": report::thresholds(d)?,
        "regime": report::regime(d)?,
        "noise_threshold": report::noise_threshold(d)?,
    }))
}

/// Light-current characteristic and noise ratio on a log grid of j/j_th.
pub fn curve_json(d: &DeviceParams, lo: f64, hi: f64, points: usize) -> Result<Value> {
    let j_th = model::threshold_current(d)?;
    let floor = d.transparency_pump() * (1.0 + 1e-6);
    let mut rows = Vec::new();
    for x in sweeps::log_grid(lo, hi, points)? {
        let p = model::steady_state(d, x * j_th)?;
        // the linearized noise exists only above transparency
        let ratio = if p.pump > floor {
            Some(noise::photon_variance_closed_form(d, p.photons)?.ratio)
        } else {
            None
        };
        rows.push(json!({
            "j_over_jth": x,
            "current_mA": p.current_amperes() * 1e3,
            "n_bar": p.photons,
            "N_bar": p.excitations,
            "ratio": ratio,
        }));
    }
    let half = noise::noise_threshold_current(d).ok();
    Ok(json!({
        "j_th": j_th,
        "n_th": model::threshold_photon_number(d)?,
        "j_half_over_jth": half.map(|h| h.pump / j_th),
        "rows": rows,
    }))
}

/// Noise threshold and its current margin against β, for the semiconductor
/// material constants.
pub fn beta_map_json(points: usize) -> Result<Value> {
    let grid = sweeps::log_grid(1e-12, 1e-1, points)?;
    let fig1 = sweeps::figure1_data(&grid)?;
    let fig2 = sweeps::figure2_data(&grid)?;
    let col = |t: &sweeps::SweepTable, c: Column| t.numbers(c).unwrap_or_default();
    Ok(json!({
        "beta": grid,
        "n_half": col(&fig1, Column::NoiseThreshold),
        "n_half_piecewise": col(&fig1, Column::NoiseThresholdPiecewise),
        "n_th": col(&fig1, Column::ThresholdPhotons),
        "margin": col(&fig2, Column::Margin),
        "margin_piecewise": col(&fig2, Column::MarginPiecewise),
    }))
}

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

/// Device with the semiconductor material constants at this β.
#[wasm_bindgen]
pub fn material_device(beta: f64) -> std::result::Result<String, JsError> {
    to_js(MaterialConstants::SEMICONDUCTOR.device(beta).map(|d| d.to_json()))
}

#[wasm_bindgen]
pub fn device_summary(beta: f64, nt: f64, tau_sp: f64, tau_cav: f64) -> std::result::Result<String, JsError> {
    to_js(device(beta, nt, tau_sp, tau_cav).and_then(|d| summary_json(&d)))
}

#[wasm_bindgen]
pub fn light_current_curve(
    beta: f64,
    nt: f64,
    tau_sp: f64,
    tau_cav: f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> std::result::Result<String, JsError> {
    to_js(device(beta, nt, tau_sp, tau_cav).and_then(|d| curve_json(&d, lo, hi, points)))
}

#[wasm_bindgen]
pub fn noise_threshold_map(points: usize) -> std::result::Result<String, JsError> {
    to_js(beta_map_json(points))
}

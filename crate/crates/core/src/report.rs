//! JSON report records shared by the command-line front end and the demo.

use serde::Serialize;
use serde_json::Value;

use crate::device::{DeviceParams, ELEMENTARY_CHARGE};
use crate::error::Result;
use crate::model::{self, OperatingPoint};
use crate::noise::{self, FluctuationRates, NoiseThresholdCurrent, RegimeTag};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdsReport {
    pub device: Value,
    #[serde(rename = "n_T")]
    pub n_t: f64,
    pub j_transparency: f64,
    pub j_th: f64,
    #[serde(rename = "I_th_A")]
    pub threshold_amperes: f64,
    pub n_th: f64,
    #[serde(rename = "beta_I_th_A")]
    pub beta_threshold_amperes: f64,
}

pub fn thresholds(params: &DeviceParams) -> Result<ThresholdsReport> {
    let j_th = model::threshold_current(params)?;
    Ok(ThresholdsReport {
        device: params.to_json(),
        n_t: params.transparency_photons(),
        j_transparency: params.transparency_pump(),
        j_th,
        threshold_amperes: j_th * ELEMENTARY_CHARGE,
        n_th: model::threshold_photon_number(params)?,
        beta_threshold_amperes: params.beta() * j_th * ELEMENTARY_CHARGE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyReport {
    pub device: Value,
    pub j: f64,
    #[serde(rename = "current_mA")]
    pub current_milliamps: f64,
    pub n_bar: f64,
    #[serde(rename = "N_bar")]
    pub excitations: f64,
}

pub fn steady(params: &DeviceParams, pump: f64) -> Result<SteadyReport> {
    let p = model::steady_state(params, pump)?;
    Ok(SteadyReport {
        device: params.to_json(),
        j: p.pump,
        current_milliamps: p.current_amperes() * 1e3,
        n_bar: p.photons,
        excitations: p.excitations,
    })
}

/// Noise at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseReport {
    pub device: Value,
    pub j: f64,
    #[serde(rename = "current_mA")]
    pub current_milliamps: f64,
    pub n_bar: f64,
    #[serde(rename = "N_bar")]
    pub excitations: f64,
    pub rates: FluctuationRates,
    pub variance: f64,
    pub thermal_limit: f64,
    pub ratio: f64,
    pub fano: f64,
    pub regime: Option<RegimeTag>,
}

pub fn noise_at(params: &DeviceParams, point: &OperatingPoint) -> Result<NoiseReport> {
    let rates = noise::fluctuation_rates(params, point.photons)?;
    let n = noise::variance_from_rates(&rates, point.photons);
    Ok(NoiseReport {
        device: params.to_json(),
        j: point.pump,
        current_milliamps: point.current_amperes() * 1e3,
        n_bar: point.photons,
        excitations: point.excitations,
        rates,
        variance: n.variance,
        thermal_limit: n.thermal_limit,
        ratio: n.ratio,
        fano: n.fano,
        regime: noise::classify_regime(params).ok(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseThresholdReport {
    pub device: Value,
    pub n_half: f64,
    pub j_half: f64,
    #[serde(rename = "current_half_mA")]
    pub current_half_milliamps: f64,
    pub j_th: f64,
    pub margin: f64,
    pub bracket_count: usize,
    pub regime: RegimeTag,
    pub asymptote: f64,
}

pub fn noise_threshold(params: &DeviceParams) -> Result<NoiseThresholdReport> {
    let t = noise::noise_threshold_photon(params)?;
    let NoiseThresholdCurrent {
        pump,
        threshold_pump,
        margin,
        ..
    } = noise::noise_threshold_current(params)?;
    let regime = noise::classify_regime(params)?;
    Ok(NoiseThresholdReport {
        device: params.to_json(),
        n_half: t.photons,
        j_half: pump,
        current_half_milliamps: pump * ELEMENTARY_CHARGE * 1e3,
        j_th: threshold_pump,
        margin,
        bracket_count: t.bracket_count,
        regime,
        asymptote: noise::asymptotic_noise_threshold(params, regime),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub device: Value,
    pub regime: RegimeTag,
    pub adiabatic_bound: f64,
    pub stimulated_boundary: f64,
    pub asym_adiabatic: f64,
    pub asym_gain_fixed: f64,
    pub asym_stimulated: f64,
}

pub fn regime(params: &DeviceParams) -> Result<RegimeReport> {
    let gain_fixed = noise::asymptotic_noise_threshold(params, RegimeTag::GainFixed);
    Ok(RegimeReport {
        device: params.to_json(),
        regime: noise::classify_regime(params)?,
        adiabatic_bound: noise::adiabatic_validity_bound(params),
        stimulated_boundary: 1.0 / (2.0 * gain_fixed / params.beta()),
        asym_adiabatic: noise::asymptotic_noise_threshold(params, RegimeTag::Adiabatic),
        asym_gain_fixed: gain_fixed,
        asym_stimulated: noise::asymptotic_noise_threshold(params, RegimeTag::StimulatedDominated),
    })
}

//! Linearized photon-number fluctuations around a stationary operating point.
//!
//! Small deviations `(δN, δn)` from the steady state obey
//! `d/dt (δN, δn) = −A (δN, δn) + (0, q_n)` where the photon channel carries
//! white shot noise of strength `2 n̄(n̄+1) γ_n`. The stationary photon
//! variance is available in closed form and, independently, from the
//! Lyapunov equation `A Σ + Σ Aᵀ = B`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::model;
use crate::roots;

/// Rates of the linearized dynamics at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuationRates {
    /// Photon-number fluctuation relaxation rate γ_n (s⁻¹).
    pub gamma_n: f64,
    /// Excitation-number fluctuation relaxation rate Γ_N (s⁻¹).
    #[serde(rename = "Gamma_N")]
    pub big_gamma_n: f64,
    /// Relaxation-oscillation coupling rate ω_R (s⁻¹).
    #[serde(rename = "omega_R")]
    pub omega_r: f64,
    /// Ratio of photon-number to excitation-number fluctuations.
    pub r: f64,
}

/// Stationary photon-number noise at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseResult {
    pub photons: f64,
    /// ⟨δn²⟩
    pub variance: f64,
    /// n̄(n̄+1)
    pub thermal_limit: f64,
    /// variance / thermal_limit, in (0, 1]
    pub ratio: f64,
    /// variance / n̄
    pub fano: f64,
}

impl NoiseResult {
    fn from_variance(photons: f64, variance: f64) -> Self {
        let thermal_limit = photons * (photons + 1.0);
        NoiseResult {
            photons,
            variance,
            thermal_limit,
            ratio: variance / thermal_limit,
            fano: variance / photons,
        }
    }
}

/// Regimes of the spontaneous emission factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeTag {
    /// Gain medium follows the photon number; noise threshold equals laser threshold.
    Adiabatic,
    /// Noise threshold fixed by the gain medium at n̄ ≈ βN_T(1 + 1/(2n_T)).
    GainFixed,
    /// Stimulated emission dominates relaxation at the noise threshold.
    StimulatedDominated,
}

impl RegimeTag {
    pub const ALL: [RegimeTag; 3] = [
        RegimeTag::Adiabatic,
        RegimeTag::GainFixed,
        RegimeTag::StimulatedDominated,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::Adiabatic => "adiabatic",
            RegimeTag::GainFixed => "gain-fixed",
            RegimeTag::StimulatedDominated => "stimulated-dominated",
        }
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegimeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RegimeTag::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown regime `{s}`")))
    }
}

fn check_above_transparency(params: &DeviceParams, photons: f64) -> Result<()> {
    let n_t = params.transparency_photons();
    if photons >= n_t {
        Ok(())
    } else {
        Err(Error::BelowTransparency { n_bar: photons, n_t })
    }
}

/// γ_n, Γ_N, ω_R and r at stationary photon number `photons` ≥ n_T.
pub fn fluctuation_rates(params: &DeviceParams, photons: f64) -> Result<FluctuationRates> {
    check_above_transparency(params, photons)?;
    let beta = params.beta();
    let n_t = params.transparency_photons();
    let big_n_t = params.transparency_excitations();
    let inv_tau_sp = 1.0 / params.tau_sp();
    let gain_rate = beta * big_n_t / n_t;
    let excess = photons - n_t;
    Ok(FluctuationRates {
        gamma_n: inv_tau_sp * gain_rate * (n_t + 0.5) / (photons + 0.5),
        big_gamma_n: excitation_relaxation_rate(params, photons),
        omega_r: inv_tau_sp * (2.0 * beta * gain_rate * excess).sqrt(),
        r: (big_n_t / (2.0 * n_t) * excess / ((photons + 0.5) * (photons + 0.5))).sqrt(),
    })
}

/// Γ_N = (1 + 2βn̄)/τ_sp; defined for any n̄ ≥ 0.
pub fn excitation_relaxation_rate(params: &DeviceParams, photons: f64) -> f64 {
    (1.0 + 2.0 * params.beta() * photons) / params.tau_sp()
}

/// Drift and diffusion matrices of the linearized dynamics in the
/// `(δN, δn)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftDiffusion {
    pub drift: Matrix2<f64>,
    pub diffusion: Matrix2<f64>,
}

/// Drift `A` (so that `d/dt x = −A x + noise`) and diffusion `B`.
///
/// The lower-left entry carries a minus sign: a positive photon fluctuation
/// is fed by a positive excitation fluctuation, which is what makes the
/// stationary covariance agree with [`photon_variance_closed_form`].
/// Only the photon channel is noisy.
pub fn drift_and_diffusion(rates: &FluctuationRates, photons: f64) -> DriftDiffusion {
    let drift = if rates.omega_r == 0.0 {
        Matrix2::new(rates.big_gamma_n, 0.0, 0.0, rates.gamma_n)
    } else {
        Matrix2::new(
            rates.big_gamma_n,
            rates.r * rates.omega_r,
            -rates.omega_r / rates.r,
            rates.gamma_n,
        )
    };
    let diffusion = Matrix2::new(0.0, 0.0, 0.0, photon_noise_strength(rates, photons));
    DriftDiffusion { drift, diffusion }
}

/// 2 n̄(n̄+1) γ_n
pub fn photon_noise_strength(rates: &FluctuationRates, photons: f64) -> f64 {
    2.0 * photons * (photons + 1.0) * rates.gamma_n
}

/// Suppression term `Γ_N ω_R² / (γ_n (ω_R² + Γ_N γ_n + Γ_N²))`, evaluated
/// without forming cubes of the rates.
pub fn suppression(rates: &FluctuationRates) -> f64 {
    let FluctuationRates {
        gamma_n,
        big_gamma_n,
        omega_r,
        ..
    } = *rates;
    if omega_r == 0.0 {
        return 0.0;
    }
    let x = big_gamma_n / omega_r;
    let y = gamma_n / omega_r;
    (big_gamma_n / gamma_n) / (1.0 + x * y + x * x)
}

/// The suppression term exactly as the printed fraction.
pub fn suppression_direct(rates: &FluctuationRates) -> f64 {
    let w2 = rates.omega_r * rates.omega_r;
    rates.big_gamma_n * w2
        / (rates.gamma_n
            * (w2 + rates.big_gamma_n * rates.gamma_n + rates.big_gamma_n * rates.big_gamma_n))
}

/// Closed-form stationary photon variance for arbitrary rates.
pub fn variance_from_rates(rates: &FluctuationRates, photons: f64) -> NoiseResult {
    let thermal = photons * (photons + 1.0);
    NoiseResult::from_variance(photons, thermal / (1.0 + suppression(rates)))
}

/// ⟨δn²⟩ = n̄(n̄+1) / (1 + Γ_N ω_R² / (γ_n (ω_R² + Γ_N γ_n + Γ_N²))).
pub fn photon_variance_closed_form(params: &DeviceParams, photons: f64) -> Result<NoiseResult> {
    let rates = fluctuation_rates(params, photons)?;
    Ok(variance_from_rates(&rates, photons))
}

fn eigen_pairs(m: &Matrix2<f64>) -> [(f64, f64); 2] {
    let ev = m.complex_eigenvalues();
    [(ev[0].re, ev[0].im), (ev[1].re, ev[1].im)]
}

/// Fails unless both eigenvalues of `drift` have positive real part.
pub fn check_positive_stable(drift: &Matrix2<f64>) -> Result<()> {
    let eigenvalues = eigen_pairs(drift);
    if eigenvalues.iter().all(|(re, _)| *re > 0.0) && drift.trace() > 0.0 && drift.determinant() > 0.0 {
        Ok(())
    } else {
        Err(Error::UnstableLinearization { eigenvalues })
    }
}

/// Solves `A Σ + Σ Aᵀ = B` through the Kronecker-sum linear system.
pub fn lyapunov_covariance(drift: &Matrix2<f64>, diffusion: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    check_positive_stable(drift)?;
    // vec is column-major: index = row + 2·col
    let mut k = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let row = i + 2 * j;
            for m in 0..2 {
                // (A Σ)_ij = Σ_m A_im Σ_mj
                k[(row, m + 2 * j)] += drift[(i, m)];
                // (Σ Aᵀ)_ij = Σ_m Σ_im A_jm
                k[(row, i + 2 * m)] += drift[(j, m)];
            }
        }
    }
    let rhs = Vector4::new(
        diffusion[(0, 0)],
        diffusion[(1, 0)],
        diffusion[(0, 1)],
        diffusion[(1, 1)],
    );
    // equilibrate rows and columns; rate entries can span many decades
    let mut row_scale = Vector4::zeros();
    for r in 0..4 {
        row_scale[r] = 1.0 / k.row(r).amax();
    }
    let mut scaled = k;
    for r in 0..4 {
        scaled.row_mut(r).scale_mut(row_scale[r]);
    }
    let mut col_scale = Vector4::zeros();
    for c in 0..4 {
        col_scale[c] = 1.0 / scaled.column(c).amax();
        scaled.column_mut(c).scale_mut(col_scale[c]);
    }
    let scaled_rhs = rhs.component_mul(&row_scale);
    let y = scaled
        .lu()
        .solve(&scaled_rhs)
        .ok_or_else(|| Error::UnstableLinearization {
            eigenvalues: eigen_pairs(drift),
        })?;
    let v = y.component_mul(&col_scale);
    Ok(Matrix2::new(v[0], v[2], v[1], v[3]))
}

/// Photon variance from the stationary covariance of the linear system.
pub fn photon_variance_lyapunov(params: &DeviceParams, photons: f64) -> Result<NoiseResult> {
    let rates = fluctuation_rates(params, photons)?;
    let dd = drift_and_diffusion(&rates, photons);
    let sigma = lyapunov_covariance(&dd.drift, &dd.diffusion)?;
    Ok(NoiseResult::from_variance(photons, sigma[(1, 1)]))
}

/// `Γ_N ω_R² − γ_n (ω_R² + Γ_N γ_n + Γ_N²)`: negative in the thermal regime,
/// positive once fluctuations fall below half the thermal limit.
pub fn noise_threshold_condition(params: &DeviceParams, photons: f64) -> Result<f64> {
    let r = fluctuation_rates(params, photons)?;
    let w2 = r.omega_r * r.omega_r;
    Ok(r.big_gamma_n * w2
        - r.gamma_n * (w2 + r.big_gamma_n * r.gamma_n + r.big_gamma_n * r.big_gamma_n))
}

/// Number of log-spaced points scanned for sign changes.
pub const THRESHOLD_SCAN_POINTS: usize = 400;
/// Relative bisection tolerance on n̄_1/2.
pub const THRESHOLD_REL_TOL: f64 = 1e-12;

/// Photon-number noise threshold n̄_1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseThreshold {
    pub photons: f64,
    /// Sign-change brackets seen on the scan; more than one is unexpected.
    pub bracket_count: usize,
}

/// Scan range `[n_T(1+1e-9), 1e3 (n_T+½)/β]` used by [`noise_threshold_photon`].
pub fn threshold_scan_range(params: &DeviceParams) -> (f64, f64) {
    let n_t = params.transparency_photons();
    (n_t * (1.0 + 1e-9), 1e3 * (n_t + 0.5) / params.beta())
}

/// Smallest photon number above n_T where the variance drops to half the
/// thermal limit.
pub fn noise_threshold_photon(params: &DeviceParams) -> Result<NoiseThreshold> {
    params.require_lasing()?;
    let (lo, hi) = threshold_scan_range(params);
    let g = |n: f64| noise_threshold_condition(params, n).unwrap_or(f64::NAN);
    let brackets = roots::log_scan_brackets(g, lo, hi, THRESHOLD_SCAN_POINTS);
    let Some(&(a, b)) = brackets.first() else {
        return Err(Error::NoRootFound { lo, hi });
    };
    if brackets.len() > 1 {
        log::warn!(
            "noise-threshold condition changes sign {} times on [{lo:e}, {hi:e}]; using the smallest root",
            brackets.len()
        );
    }
    Ok(NoiseThreshold {
        photons: roots::bisect(g, a, b, THRESHOLD_REL_TOL),
        bracket_count: brackets.len(),
    })
}

/// Pump rate at the noise threshold and its distance from the laser threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseThresholdCurrent {
    pub photons: f64,
    pub pump: f64,
    pub threshold_pump: f64,
    /// (j_1/2 − j_th) / j_th
    pub margin: f64,
}

pub fn noise_threshold_current(params: &DeviceParams) -> Result<NoiseThresholdCurrent> {
    let photons = noise_threshold_photon(params)?.photons;
    let pump = model::current_for_photon_number(params, photons)?;
    let threshold_pump = model::threshold_current(params)?;
    Ok(NoiseThresholdCurrent {
        photons,
        pump,
        threshold_pump,
        margin: (pump - threshold_pump) / threshold_pump,
    })
}

/// Leading-order noise threshold within one regime.
pub fn asymptotic_noise_threshold(params: &DeviceParams, regime: RegimeTag) -> f64 {
    let beta = params.beta();
    let n_t = params.transparency_photons();
    let big_n_t = params.transparency_excitations();
    match regime {
        RegimeTag::Adiabatic => ((n_t + 0.5) / (2.0 * beta)).sqrt(),
        RegimeTag::GainFixed => beta * big_n_t * (1.0 + 1.0 / (2.0 * n_t)),
        RegimeTag::StimulatedDominated => (big_n_t / 2.0 * (1.0 + 1.0 / (2.0 * n_t))).sqrt(),
    }
}

/// Upper bound on β for adiabatic elimination at threshold,
/// `(1/(2n_T+1)) (n_T/(βN_T))²`.
pub fn adiabatic_validity_bound(params: &DeviceParams) -> f64 {
    let n_t = params.transparency_photons();
    let x = n_t / (params.beta() * params.transparency_excitations());
    x * x / (2.0 * n_t + 1.0)
}

/// Safety factor turning "β ≪ bound" into a sharp test.
pub const ADIABATIC_MARGIN: f64 = 0.1;

pub fn classify_regime(params: &DeviceParams) -> Result<RegimeTag> {
    params.require_lasing()?;
    let beta = params.beta();
    if beta < ADIABATIC_MARGIN * adiabatic_validity_bound(params) {
        return Ok(RegimeTag::Adiabatic);
    }
    let gain_fixed = asymptotic_noise_threshold(params, RegimeTag::GainFixed);
    if 2.0 * beta * gain_fixed > 1.0 {
        Ok(RegimeTag::StimulatedDominated)
    } else {
        Ok(RegimeTag::GainFixed)
    }
}

//! Acceptance checks, shared by the `verify` subcommand and the test suite.
//!
//! Every check carries its tolerance and runtime limit as constants here;
//! the outcome records what was measured so a failing line is
//! self-explanatory.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::device::{DeviceParams, MaterialConstants, ELEMENTARY_CHARGE};
use crate::error::Result;
use crate::gillespie::{self, GillespieConfig};
use crate::langevin::{self, LangevinConfig, LinearLangevin};
use crate::model;
use crate::noise;
use crate::rng;
use crate::sweeps;

pub const RANDOM_SAMPLES: usize = 1000;
pub const LYAPUNOV_REL_TOL: f64 = 1e-9;
pub const ADIABATIC_REL_TOL: f64 = 0.1;
pub const GAIN_FIXED_RANGE: (f64, f64) = (3e3, 3e4);
pub const ASYMPTOTE_FACTOR: f64 = 3.0;
pub const FIGURE2_POINTS: usize = 60;
pub const ADIABATIC_MARGIN_LIMIT: f64 = 1e-3;
pub const BETA_CURRENT_RANGE_A: (f64, f64) = (0.2e-6, 2e-6);
pub const LANGEVIN_STEPS: u64 = 10_000_000;
pub const LANGEVIN_ABS_TOL: f64 = 0.05;
pub const GILLESPIE_EVENTS: f64 = 4e7;
pub const GILLESPIE_LOW_PUMP: f64 = 0.2;
pub const GILLESPIE_HIGH_PUMP: f64 = 5.0;
pub const GILLESPIE_LOW_MIN_RATIO: f64 = 0.8;
pub const GILLESPIE_HIGH_MAX_RATIO: f64 = 0.5;
pub const GILLESPIE_MEAN_REL_TOL: f64 = 0.05;
pub const ROUND_TRIP_REL_TOL: f64 = 1e-10;
pub const RESIDUAL_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_s: f64,
    pub limit_s: f64,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<42} {:>9.3}s (limit {}s)  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_s,
            self.limit_s,
            self.detail
        )
    }
}

fn timed<F>(id: u32, name: &str, limit_s: f64, check: F) -> CriterionOutcome
where
    F: FnOnce() -> Result<(bool, String)>,
{
    let start = Instant::now();
    let result = check();
    let elapsed_s = start.elapsed().as_secs_f64();
    let (ok, detail) = match result {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = elapsed_s < limit_s;
    CriterionOutcome {
        id,
        name: name.to_owned(),
        passed: ok && in_time,
        detail: if in_time {
            detail
        } else {
            format!("{detail}; too slow")
        },
        elapsed_s,
        limit_s,
    }
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo * (hi / lo).powf(rng.random::<f64>())
}

/// Random lasing devices and operating points in `(n_T, 1e3·n̄_th]`.
pub fn random_operating_points(seed: u64, count: usize) -> Vec<(DeviceParams, f64)> {
    let mut rng = rng::stream(seed, 0xACCE);
    (0..count)
        .map(|_| {
            let beta = log_uniform(&mut rng, 1e-12, 1e-1);
            let n_t = 0.5 + 3.5 * (1.0 - rng.random::<f64>());
            let beta_n = log_uniform(&mut rng, 1e2, 1e6);
            let tau_sp = log_uniform(&mut rng, 1e-10, 1e-6);
            let d = DeviceParams::with_transparency_photons(beta, beta_n / beta, tau_sp, n_t)
                .expect("sampled device is valid");
            let top = 1e3 * model::threshold_photon_number(&d).expect("lasing");
            let u = 1.0 - rng.random::<f64>();
            (d, n_t * (top / n_t).powf(u))
        })
        .collect()
}

pub fn thermal_bound(seed: u64) -> CriterionOutcome {
    timed(1, "thermal bound (0 < ratio <= 1)", 1.0, || {
        let mut worst = (f64::INFINITY, f64::NEG_INFINITY);
        for (d, n) in random_operating_points(seed, RANDOM_SAMPLES) {
            let r = noise::photon_variance_closed_form(&d, n)?.ratio;
            worst = (worst.0.min(r), worst.1.max(r));
        }
        Ok((
            worst.0 > 0.0 && worst.1 <= 1.0,
            format!("ratio range [{:.3e}, {}]", worst.0, worst.1),
        ))
    })
}

pub fn closed_form_matches_lyapunov(seed: u64) -> CriterionOutcome {
    timed(2, "closed form == Lyapunov", 1.0, || {
        let mut worst: f64 = 0.0;
        for (d, n) in random_operating_points(seed, RANDOM_SAMPLES) {
            let a = noise::photon_variance_closed_form(&d, n)?.variance;
            let b = noise::photon_variance_lyapunov(&d, n)?.variance;
            worst = worst.max((a - b).abs() / a);
        }
        Ok((
            worst <= LYAPUNOV_REL_TOL,
            format!("max relative difference {worst:.2e} (tol {LYAPUNOV_REL_TOL:e})"),
        ))
    })
}

fn material(beta: f64) -> Result<DeviceParams> {
    MaterialConstants::SEMICONDUCTOR.device(beta)
}

pub fn adiabatic_regime() -> CriterionOutcome {
    timed(3, "adiabatic regime n_half ~ n_th", 1.0, || {
        let mut worst: f64 = 0.0;
        for beta in sweeps::log_grid(1e-12, 1e-10, 9)? {
            let d = material(beta)?;
            let n_half = noise::noise_threshold_photon(&d)?.photons;
            let n_th = model::threshold_photon_number(&d)?;
            worst = worst.max((n_half / n_th - 1.0).abs());
        }
        Ok((
            worst <= ADIABATIC_REL_TOL,
            format!("max |n_half/n_th - 1| = {worst:.4}"),
        ))
    })
}

pub fn gain_fixed_regime() -> CriterionOutcome {
    timed(4, "gain-fixed regime n_half ~ 1e4", 1.0, || {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for beta in sweeps::log_grid(1e-7, 1e-5, 9)? {
            let n_half = noise::noise_threshold_photon(&material(beta)?)?.photons;
            lo = lo.min(n_half);
            hi = hi.max(n_half);
        }
        Ok((
            lo >= GAIN_FIXED_RANGE.0 && hi <= GAIN_FIXED_RANGE.1,
            format!("n_half in [{lo:.0}, {hi:.0}]"),
        ))
    })
}

fn factor(a: f64, b: f64) -> f64 {
    (a / b).max(b / a)
}

pub fn stimulated_regime() -> CriterionOutcome {
    timed(5, "stimulated regime n_half ~ 1e2/sqrt(beta)", 1.0, || {
        let mut worst: f64 = 1.0;
        for beta in sweeps::log_grid(1e-3, 1e-1, 9)? {
            let n_half = noise::noise_threshold_photon(&material(beta)?)?.photons;
            worst = worst.max(factor(n_half, 1e2 / beta.sqrt()));
        }
        Ok((
            worst <= ASYMPTOTE_FACTOR,
            format!("worst factor {worst:.3}"),
        ))
    })
}

pub fn figure2_reproduction() -> CriterionOutcome {
    timed(6, "noise-threshold margin vs beta", 5.0, || {
        let grid = sweeps::log_grid(1e-12, 1e-1, FIGURE2_POINTS)?;
        let table = sweeps::figure2_data(&grid)?;
        if !table.failures.is_empty() {
            return Ok((false, format!("{} rows failed", table.failures.len())));
        }
        let inv = table.numbers(sweeps::Column::InvBeta).expect("column");
        let margin = table.numbers(sweeps::Column::Margin).expect("column");
        let piecewise = table.numbers(sweeps::Column::MarginPiecewise).expect("column");
        let mut worst: f64 = 1.0;
        let mut checked = 0;
        for i in 0..inv.len() {
            let beta = 1.0 / inv[i];
            let inside = (1e-7..=1e-5).contains(&beta) || (1e-3..=1e-1 * (1.0 + 1e-12)).contains(&beta);
            if inside {
                worst = worst.max(factor(margin[i], piecewise[i]));
                checked += 1;
            }
        }
        let small = noise::noise_threshold_current(&material(1e-10)?)?.margin;
        Ok((
            worst <= ASYMPTOTE_FACTOR && small.abs() < ADIABATIC_MARGIN_LIMIT && checked > 0,
            format!("worst factor {worst:.3} over {checked} rows; margin(1e-10) = {small:.2e}"),
        ))
    })
}

pub fn threshold_current_anchor() -> CriterionOutcome {
    timed(7, "beta * I_th in [0.2, 2] uA", 1e-3, || {
        let d = material(1e-5)?;
        let product = d.beta() * model::threshold_current(&d)? * ELEMENTARY_CHARGE;
        Ok((
            (BETA_CURRENT_RANGE_A.0..=BETA_CURRENT_RANGE_A.1).contains(&product),
            format!("beta * I_th = {:.3} uA", product * 1e6),
        ))
    })
}

pub fn thermal_far_above_threshold() -> CriterionOutcome {
    timed(8, "beta=1e-3 thermal at 2 j_th", 1e-3, || {
        let d = material(1e-3)?;
        let p = model::steady_state(&d, 2.0 * model::threshold_current(&d)?)?;
        let r = noise::photon_variance_closed_form(&d, p.photons)?.ratio;
        Ok((r > 0.5, format!("ratio = {r:.4}")))
    })
}

/// Langevin estimate of the variance ratio at the device's noise threshold.
pub fn langevin_oracle(device: &DeviceParams, seed: u64) -> CriterionOutcome {
    timed(9, "Langevin variance at n_half", 60.0, || {
        let n_half = noise::noise_threshold_photon(device)?.photons;
        let system = LinearLangevin::from_params(device, n_half)?;
        let config = LangevinConfig::for_system(&system, LANGEVIN_STEPS, seed);
        let stats = langevin::simulate_linear(&system, &config, [0.0, 0.0])?;
        let thermal = n_half * (n_half + 1.0);
        let ratio = stats.photons.variance / thermal;
        let se = stats.photons.variance_std_error / thermal;
        let tol = (3.0 * se).max(LANGEVIN_ABS_TOL);
        let expected = noise::photon_variance_closed_form(device, n_half)?.ratio;
        Ok((
            (ratio - expected).abs() <= tol,
            format!("simulated {ratio:.4} +- {se:.4}, closed form {expected:.6}, tol {tol:.4}"),
        ))
    })
}

/// Run length giving about [`GILLESPIE_EVENTS`] events at pump `pump`.
pub fn gillespie_config(device: &DeviceParams, pump: f64, seed: u64) -> Result<GillespieConfig> {
    let p = model::steady_state(device, pump)?;
    let rate: f64 = gillespie::propensities(device, pump, p.excitations.round() as u64, p.photons.round() as u64)
        .iter()
        .sum();
    let t_max = GILLESPIE_EVENTS / rate;
    let burn_in = (50.0 * device.tau_sp()).min(0.05 * t_max);
    GillespieConfig::near_steady_state(device, pump, t_max, burn_in, seed)
}

/// Jump-process checks at 0.2 and 5 times threshold.
pub fn gillespie_oracle(device: &DeviceParams, seed: u64) -> CriterionOutcome {
    timed(10, "Gillespie thermal/sub-thermal", 120.0, || {
        let j_th = model::threshold_current(device)?;
        let mut ok = true;
        let mut notes = Vec::new();
        for (k, multiple) in [GILLESPIE_LOW_PUMP, GILLESPIE_HIGH_PUMP].into_iter().enumerate() {
            let pump = multiple * j_th;
            let config = gillespie_config(device, pump, seed.wrapping_add(k as u64))?;
            let stats = gillespie::simulate_gillespie(device, pump, &config)?;
            let mean_n = stats.photons.mean;
            let ratio = stats.photons.variance / (mean_n * (mean_n + 1.0));
            let target = model::steady_state(device, pump)?;
            let dn = (mean_n / target.photons - 1.0).abs();
            let dbig = (stats.excitations.mean / target.excitations - 1.0).abs();
            let ratio_ok = if k == 0 {
                ratio > GILLESPIE_LOW_MIN_RATIO
            } else {
                ratio < GILLESPIE_HIGH_MAX_RATIO
            };
            let means_ok = dn <= GILLESPIE_MEAN_REL_TOL && dbig <= GILLESPIE_MEAN_REL_TOL;
            ok &= ratio_ok && means_ok;
            notes.push(format!(
                "{multiple} j_th: ratio {ratio:.3}, n {mean_n:.4} vs {:.4} ({:.1}%), N dev {:.2}%",
                target.photons,
                100.0 * dn,
                100.0 * dbig
            ));
            if k == 0 {
                let again = gillespie::simulate_gillespie(device, pump, &config)?;
                if again != stats {
                    ok = false;
                    notes.push("not reproducible".into());
                }
            }
        }
        Ok((ok, notes.join("; ")))
    })
}

pub fn round_trip_and_residuals() -> CriterionOutcome {
    timed(11, "round trip and rate residuals", 1.0, || {
        let mut worst_inverse: f64 = 0.0;
        let mut worst_residual: f64 = 0.0;
        let devices = [
            DeviceParams::reference(),
            DeviceParams::preset("toy-a")?,
            DeviceParams::preset("toy-b")?,
            material(1e-10)?,
            material(1e-2)?,
        ];
        for d in &devices {
            let j_th = model::threshold_current(d)?;
            for j in sweeps::log_grid(0.1 * j_th, 100.0 * j_th, 200)? {
                let p = model::steady_state(d, j)?;
                let back = model::current_for_photon_number(d, p.photons)?;
                worst_inverse = worst_inverse.max((back / j - 1.0).abs());
                let (r0, r1) = model::rate_residuals(d, p.excitations, p.photons, j)?;
                let scale = model::dominant_flux(d, &p);
                worst_residual = worst_residual.max(r0.abs().max(r1.abs()) / scale);
            }
        }
        Ok((
            worst_inverse <= ROUND_TRIP_REL_TOL && worst_residual <= RESIDUAL_REL_TOL,
            format!("inverse {worst_inverse:.2e}, residual {worst_residual:.2e}"),
        ))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Device for the stochastic checks; `None` uses the reference device for
    /// the Langevin check and `toy-a` for the jump-process check.
    pub preset: Option<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 7, preset: None }
    }
}

/// Runs every acceptance check in order.
pub fn run_all(options: &VerifyOptions) -> Result<Vec<CriterionOutcome>> {
    let (langevin_device, jump_device) = match &options.preset {
        Some(name) => {
            let d = DeviceParams::preset(name)?;
            (d, d)
        }
        None => (DeviceParams::reference(), DeviceParams::preset("toy-a")?),
    };
    Ok(vec![
        thermal_bound(options.seed),
        closed_form_matches_lyapunov(options.seed),
        adiabatic_regime(),
        gain_fixed_regime(),
        stimulated_regime(),
        figure2_reproduction(),
        threshold_current_anchor(),
        thermal_far_above_threshold(),
        langevin_oracle(&langevin_device, options.seed),
        gillespie_oracle(&jump_device, options.seed),
        round_trip_and_residuals(),
    ])
}

//! Euler–Maruyama integration of the linearized fluctuation dynamics.

use nalgebra::Matrix2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::noise::{self, DriftDiffusion};
use crate::rng;
use crate::stats::{StationaryAccumulator, TrajectoryStats};

/// Largest admissible `dt · max(Γ_N, γ_n, ω_R)`.
pub const STABILITY_FACTOR: f64 = 0.01;
/// Default `dt · max(Γ_N, γ_n, ω_R)`.
pub const DEFAULT_STEP_FACTOR: f64 = 0.005;
/// Bound on the relative loss of damping per mode, `|λ|² dt / (2 Re λ)`, for
/// the default step. Euler–Maruyama under-damps oscillatory modes by this
/// amount, which inflates the stationary variance by about as much.
pub const DAMPING_ERROR_BUDGET: f64 = 0.01;
/// Default burn-in, in relaxation times of the slowest mode.
pub const DEFAULT_BURN_IN_RELAXATIONS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangevinConfig {
    /// Step in seconds.
    pub dt: f64,
    pub n_steps: u64,
    pub burn_in_steps: u64,
    pub seed: u64,
}

impl LangevinConfig {
    /// Default step and burn-in for `system`, with `n_steps` in total.
    pub fn for_system(system: &LinearLangevin, n_steps: u64, seed: u64) -> Self {
        let dt = (DEFAULT_STEP_FACTOR / system.max_rate()).min(system.damping_limited_step());
        let burn_in = DEFAULT_BURN_IN_RELAXATIONS / system.slowest_relaxation_rate();
        LangevinConfig {
            dt,
            n_steps,
            burn_in_steps: ((burn_in / dt).ceil() as u64).min(n_steps / 2),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.n_steps <= self.burn_in_steps {
            return Err(Error::InvalidConfig(format!(
                "n_steps ({}) must exceed burn_in_steps ({})",
                self.n_steps, self.burn_in_steps
            )));
        }
        Ok(())
    }
}

/// `d x = −A x dt + diag(√B) dW` in the `(δN, δn)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearLangevin {
    pub drift: Matrix2<f64>,
    /// Square roots of the diagonal diffusion entries.
    pub noise_amplitude: [f64; 2],
}

impl LinearLangevin {
    pub fn new(drift_diffusion: &DriftDiffusion) -> Self {
        let b = &drift_diffusion.diffusion;
        LinearLangevin {
            drift: drift_diffusion.drift,
            noise_amplitude: [b[(0, 0)].max(0.0).sqrt(), b[(1, 1)].max(0.0).sqrt()],
        }
    }

    /// Linearization of the device around stationary photon number `photons`.
    pub fn from_params(params: &DeviceParams, photons: f64) -> Result<Self> {
        let n_t = params.transparency_photons();
        if !(photons > n_t) {
            return Err(Error::BelowTransparency { n_bar: photons, n_t });
        }
        let rates = noise::fluctuation_rates(params, photons)?;
        Ok(Self::new(&noise::drift_and_diffusion(&rates, photons)))
    }

    /// max(Γ_N, γ_n, ω_R), read off the drift matrix.
    pub fn max_rate(&self) -> f64 {
        let a = &self.drift;
        let coupling = (a[(0, 1)] * a[(1, 0)]).abs().sqrt();
        a[(0, 0)].abs().max(a[(1, 1)].abs()).max(coupling)
    }

    /// Smallest real part among the drift eigenvalues.
    pub fn slowest_relaxation_rate(&self) -> f64 {
        let ev = self.drift.complex_eigenvalues();
        ev[0].re.min(ev[1].re)
    }

    /// Largest step keeping the per-mode damping error within
    /// [`DAMPING_ERROR_BUDGET`].
    pub fn damping_limited_step(&self) -> f64 {
        self.drift
            .complex_eigenvalues()
            .iter()
            .map(|l| 2.0 * DAMPING_ERROR_BUDGET * l.re / l.norm_sqr())
            .fold(f64::INFINITY, f64::min)
    }

    /// One Euler–Maruyama step with standard-normal draws `z`.
    #[inline]
    pub fn step(&self, x: [f64; 2], dt: f64, z: [f64; 2]) -> [f64; 2] {
        let a = &self.drift;
        let sq = dt.sqrt();
        [
            x[0] - (a[(0, 0)] * x[0] + a[(0, 1)] * x[1]) * dt + self.noise_amplitude[0] * sq * z[0],
            x[1] - (a[(1, 0)] * x[0] + a[(1, 1)] * x[1]) * dt + self.noise_amplitude[1] * sq * z[1],
        ]
    }
}

/// Stationary statistics of both fluctuation channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangevinStats {
    /// δn
    pub photons: TrajectoryStats,
    /// δN
    pub excitations: TrajectoryStats,
}

/// Integrates `system` from `initial` and collects post-burn-in statistics.
pub fn simulate_linear(
    system: &LinearLangevin,
    config: &LangevinConfig,
    initial: [f64; 2],
) -> Result<LangevinStats> {
    config.validate()?;
    noise::check_positive_stable(&system.drift)?;
    let limit = STABILITY_FACTOR / system.max_rate();
    if config.dt > limit {
        return Err(Error::StepTooLarge { dt: config.dt, limit });
    }
    let mut rng = rng::stream(config.seed, 0);
    let window = (config.n_steps - config.burn_in_steps) as f64 * config.dt;
    let mut photons = StationaryAccumulator::new(window);
    let mut excitations = StationaryAccumulator::new(window);
    let noisy = [system.noise_amplitude[0] != 0.0, system.noise_amplitude[1] != 0.0];
    let mut x = initial;
    for i in 0..config.n_steps {
        let mut z = [0.0; 2];
        for k in 0..2 {
            if noisy[k] {
                z[k] = rng.sample(StandardNormal);
            }
        }
        x = system.step(x, config.dt, z);
        if i >= config.burn_in_steps {
            excitations.push(x[0], config.dt);
            photons.push(x[1], config.dt);
        }
    }
    Ok(LangevinStats {
        photons: photons.finish()?,
        excitations: excitations.finish()?,
    })
}

/// Linear Langevin simulation of the device at photon number `photons`,
/// started from the stationary point.
pub fn simulate_langevin(
    params: &DeviceParams,
    photons: f64,
    config: &LangevinConfig,
) -> Result<LangevinStats> {
    let system = LinearLangevin::from_params(params, photons)?;
    simulate_linear(&system, config, [0.0, 0.0])
}

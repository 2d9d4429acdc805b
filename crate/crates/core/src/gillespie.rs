//! Exact-event simulation of the rate equations as a Markov jump process.
//!
//! The net rates are split into six non-negative channels whose mean field
//! reproduces the deterministic equations term by term:
//!
//! | channel                 | transition           | propensity          |
//! |-------------------------|----------------------|---------------------|
//! | pump                    | N → N+1              | j                   |
//! | spontaneous, into mode  | (N, n) → (N−1, n+1)  | βN/τ_sp             |
//! | spontaneous, elsewhere  | N → N−1              | (1−β)N/τ_sp         |
//! | stimulated emission     | (N, n) → (N−1, n+1)  | 2βNn/τ_sp           |
//! | absorption              | (N, n) → (N+1, n−1)  | 2βN_T n/τ_sp        |
//! | cavity loss             | n → n−1              | n/τ_cav             |
//!
//! Absorption draws on a fixed transparency reservoir of N_T absorbers, so
//! stimulated emission minus absorption gives the net gain 2β(N−N_T)n/τ_sp.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::model;
use crate::rng;
use crate::stats::{StationaryAccumulator, TrajectoryStats};

/// Default cap on the estimated number of events per run.
pub const DEFAULT_EVENT_BUDGET: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Pump,
    SpontaneousIntoMode,
    SpontaneousElsewhere,
    Stimulated,
    Absorption,
    CavityLoss,
}

impl Channel {
    pub const ALL: [Channel; 6] = [
        Channel::Pump,
        Channel::SpontaneousIntoMode,
        Channel::SpontaneousElsewhere,
        Channel::Stimulated,
        Channel::Absorption,
        Channel::CavityLoss,
    ];

    /// Change of (N, n).
    pub fn stoichiometry(self) -> (i64, i64) {
        match self {
            Channel::Pump => (1, 0),
            Channel::SpontaneousIntoMode | Channel::Stimulated => (-1, 1),
            Channel::SpontaneousElsewhere => (-1, 0),
            Channel::Absorption => (1, -1),
            Channel::CavityLoss => (0, -1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GillespieConfig {
    /// End of the simulated interval in seconds.
    pub t_max: f64,
    /// Statistics ignore `[0, burn_in)`.
    pub burn_in: f64,
    pub seed: u64,
    /// (N₀, n₀)
    pub initial_state: (u64, u64),
    #[serde(default = "default_budget")]
    pub event_budget: f64,
}

fn default_budget() -> f64 {
    DEFAULT_EVENT_BUDGET
}

impl GillespieConfig {
    /// Starts at the rounded deterministic steady state for pump `pump`.
    pub fn near_steady_state(params: &DeviceParams, pump: f64, t_max: f64, burn_in: f64, seed: u64) -> Result<Self> {
        let p = model::steady_state(params, pump)?;
        Ok(GillespieConfig {
            t_max,
            burn_in,
            seed,
            initial_state: (p.excitations.round() as u64, p.photons.round() as u64),
            event_budget: DEFAULT_EVENT_BUDGET,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.burn_in >= 0.0 && self.t_max > self.burn_in && self.t_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "need t_max > burn_in >= 0, got t_max = {}, burn_in = {}",
                self.t_max, self.burn_in
            )));
        }
        Ok(())
    }
}

/// Channel propensities in [`Channel::ALL`] order.
pub fn propensities(params: &DeviceParams, pump: f64, excitations: u64, photons: u64) -> [f64; 6] {
    let big_n = excitations as f64;
    let n = photons as f64;
    let beta = params.beta();
    let inv_tau_sp = 1.0 / params.tau_sp();
    let stim = 2.0 * beta * inv_tau_sp;
    [
        pump,
        beta * big_n * inv_tau_sp,
        (1.0 - beta) * big_n * inv_tau_sp,
        stim * big_n * n,
        stim * params.transparency_excitations() * n,
        n / params.tau_cav(),
    ]
}

/// Expected number of events over the run, judged from the larger of the
/// initial and the mean-field total propensity.
pub fn estimate_event_count(params: &DeviceParams, pump: f64, config: &GillespieConfig) -> Result<f64> {
    let p = model::steady_state(params, pump)?;
    let mean_field: f64 = propensities(params, pump, p.excitations.round() as u64, p.photons.round() as u64)
        .iter()
        .sum();
    let initial: f64 = propensities(params, pump, config.initial_state.0, config.initial_state.1)
        .iter()
        .sum();
    Ok(mean_field.max(initial) * config.t_max)
}

/// Time-weighted stationary statistics of a jump trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GillespieStats {
    /// n
    pub photons: TrajectoryStats,
    /// N
    pub excitations: TrajectoryStats,
    pub events: u64,
}

pub fn simulate_gillespie(params: &DeviceParams, pump: f64, config: &GillespieConfig) -> Result<GillespieStats> {
    simulate_gillespie_with(params, pump, config, |_, _, _| {})
}

/// As [`simulate_gillespie`], calling `observer(t, N, n)` for the initial
/// state and after every event.
pub fn simulate_gillespie_with<F>(
    params: &DeviceParams,
    pump: f64,
    config: &GillespieConfig,
    observer: F,
) -> Result<GillespieStats>
where
    F: FnMut(f64, u64, u64),
{
    run_trajectory(params, pump, config, 0, observer).and_then(|(p, e, events)| {
        Ok(GillespieStats {
            photons: p.finish()?,
            excitations: e.finish()?,
            events,
        })
    })
}

fn run_trajectory<F>(
    params: &DeviceParams,
    pump: f64,
    config: &GillespieConfig,
    stream: u64,
    mut observer: F,
) -> Result<(StationaryAccumulator, StationaryAccumulator, u64)>
where
    F: FnMut(f64, u64, u64),
{
    config.validate()?;
    if !(pump >= 0.0) {
        return Err(Error::NegativeInput { name: "j", value: pump });
    }
    let estimated = estimate_event_count(params, pump, config)?;
    if estimated > config.event_budget {
        return Err(Error::BudgetExceeded {
            estimated,
            cap: config.event_budget,
        });
    }
    let mut rng = rng::stream(config.seed, stream);
    let window = config.t_max - config.burn_in;
    let mut photon_acc = StationaryAccumulator::new(window);
    let mut excitation_acc = StationaryAccumulator::new(window);
    let (mut big_n, mut n) = config.initial_state;
    let mut t = 0.0;
    let mut events = 0u64;
    observer(t, big_n, n);
    loop {
        let a = propensities(params, pump, big_n, n);
        let total: f64 = a.iter().sum();
        let wait = if total > 0.0 {
            rng.sample::<f64, _>(Exp1) / total
        } else {
            f64::INFINITY
        };
        let t_next = (t + wait).min(config.t_max);
        let dwell = t_next - t.max(config.burn_in);
        if dwell > 0.0 {
            photon_acc.push(n as f64, dwell);
            excitation_acc.push(big_n as f64, dwell);
        }
        if t + wait >= config.t_max {
            break;
        }
        t += wait;
        let mut target = rng.random::<f64>() * total;
        let mut chosen = Channel::CavityLoss;
        for (channel, rate) in Channel::ALL.into_iter().zip(a) {
            if rate > 0.0 {
                chosen = channel;
                if target < rate {
                    break;
                }
                target -= rate;
            }
        }
        let (d_big, d_small) = chosen.stoichiometry();
        big_n = big_n.checked_add_signed(d_big).expect("channel fired with zero population");
        n = n.checked_add_signed(d_small).expect("channel fired with zero population");
        events += 1;
        observer(t, big_n, n);
    }
    Ok((photon_acc, excitation_acc, events))
}

/// Runs `trajectories` independent copies on separate random streams and
/// pools their statistics.
pub fn simulate_gillespie_ensemble(
    params: &DeviceParams,
    pump: f64,
    config: &GillespieConfig,
    trajectories: u64,
) -> Result<GillespieStats> {
    if trajectories == 0 {
        return Err(Error::InvalidConfig("need at least one trajectory".into()));
    }
    let run = |k: u64| run_trajectory(params, pump, config, k, |_, _, _| {});
    #[cfg(feature = "parallel")]
    let runs: Vec<_> = {
        use rayon::prelude::*;
        (0..trajectories).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<_> = (0..trajectories).map(run).collect();
    let mut runs = runs.into_iter();
    let (mut photons, mut excitations, mut events) = runs.next().expect("non-empty")?;
    for r in runs {
        let (p, e, k) = r?;
        photons.merge(p);
        excitations.merge(e);
        events += k;
    }
    Ok(GillespieStats {
        photons: photons.finish()?,
        excitations: excitations.finish()?,
        events,
    })
}

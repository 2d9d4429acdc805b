use laser_noise::gillespie::{self, GillespieConfig};
use laser_noise::langevin::{self, LangevinConfig, LinearLangevin};
use laser_noise::stats::StationaryAccumulator;
use laser_noise::{model, noise, rng, verify};
use laser_noise::{DeviceParams, FluctuationRates};
use rand::Rng;
use rand_distr::StandardNormal;

const STEPS: u64 = 4_000_000;

#[test]
fn langevin_matches_closed_form_at_random_points() {
    let mut checked = 0;
    for (k, (d, n)) in verify::random_operating_points(19, 200).into_iter().enumerate() {
        let sys = LinearLangevin::from_params(&d, n).unwrap();
        let cfg = LangevinConfig::for_system(&sys, STEPS, k as u64);
        // only points whose window spans many relaxation times of the slow mode
        let window = (cfg.n_steps - cfg.burn_in_steps) as f64 * cfg.dt;
        if window * sys.slowest_relaxation_rate() < 500.0 {
            continue;
        }
        let s = langevin::simulate_linear(&sys, &cfg, [0.0, 0.0]).unwrap();
        let thermal = n * (n + 1.0);
        let sim = s.photons.variance / thermal;
        let se = s.photons.variance_std_error / thermal;
        let exact = noise::photon_variance_closed_form(&d, n).unwrap().ratio;
        assert!(
            (sim - exact).abs() <= (3.0 * se).max(0.05),
            "{d:?} n = {n}: {sim} +- {se} vs {exact}"
        );
        checked += 1;
        if checked == 10 {
            break;
        }
    }
    assert_eq!(checked, 10);
}

#[test]
fn uncoupled_photon_channel_is_thermal() {
    let rates = FluctuationRates {
        gamma_n: 1.0,
        big_gamma_n: 5.0,
        omega_r: 0.0,
        r: 0.0,
    };
    let n = 50.0;
    assert_eq!(noise::variance_from_rates(&rates, n).ratio, 1.0);
    let sys = LinearLangevin::new(&noise::drift_and_diffusion(&rates, n));
    let s = langevin::simulate_linear(&sys, &LangevinConfig::for_system(&sys, STEPS, 5), [0.0, 0.0]).unwrap();
    let ratio = s.photons.variance / (n * (n + 1.0));
    let se = s.photons.variance_std_error / (n * (n + 1.0));
    assert!((ratio - 1.0).abs() <= (3.0 * se).max(0.05), "{ratio} +- {se}");
    assert_eq!(s.excitations.variance, 0.0);
}

/// Variance of δn along two Euler–Maruyama paths driven by the same Brownian
/// path, one with half the step of the other.
fn coupled_variances(sys: &LinearLangevin, dt: f64, coarse_steps: u64, burn_in: u64, seed: u64) -> (f64, f64, f64) {
    let mut r = rng::stream(seed, 0);
    let window = (coarse_steps - burn_in) as f64 * dt;
    let mut fine_acc = StationaryAccumulator::new(window);
    let mut coarse_acc = StationaryAccumulator::new(window);
    let (mut fine, mut coarse) = ([0.0; 2], [0.0; 2]);
    for i in 0..coarse_steps {
        let z1: f64 = r.sample(StandardNormal);
        let z2: f64 = r.sample(StandardNormal);
        fine = sys.step(fine, 0.5 * dt, [0.0, z1]);
        if i >= burn_in {
            fine_acc.push(fine[1], 0.5 * dt);
        }
        fine = sys.step(fine, 0.5 * dt, [0.0, z2]);
        coarse = sys.step(coarse, dt, [0.0, (z1 + z2) / 2f64.sqrt()]);
        if i >= burn_in {
            fine_acc.push(fine[1], 0.5 * dt);
            coarse_acc.push(coarse[1], dt);
        }
    }
    let f = fine_acc.finish().unwrap();
    let c = coarse_acc.finish().unwrap();
    (f.variance, c.variance, f.variance_std_error)
}

#[test]
fn halving_the_step_moves_the_variance_less_than_its_error() {
    let d = DeviceParams::reference();
    let n = noise::noise_threshold_photon(&d).unwrap().photons;
    let sys = LinearLangevin::from_params(&d, n).unwrap();
    assert_eq!(sys.noise_amplitude[0], 0.0);
    let cfg = LangevinConfig::for_system(&sys, STEPS, 0);
    let (fine, coarse, se) = coupled_variances(&sys, cfg.dt, cfg.n_steps, cfg.burn_in_steps, 11);
    assert!((fine - coarse).abs() < se, "fine {fine}, coarse {coarse}, se {se}");
}

#[test]
fn langevin_rejects_unstable_step() {
    let d = DeviceParams::preset("toy-a").unwrap();
    let sys = LinearLangevin::from_params(&d, 20.0).unwrap();
    let cfg = LangevinConfig {
        dt: 0.02 / sys.max_rate(),
        n_steps: 100,
        burn_in_steps: 10,
        seed: 0,
    };
    let e = langevin::simulate_linear(&sys, &cfg, [0.0, 0.0]).unwrap_err();
    assert_eq!(e.kind(), "StepTooLarge");
}

#[test]
fn gillespie_mean_follows_rate_equations() {
    let d = DeviceParams::preset("toy-b").unwrap();
    let j = 3.0 * model::threshold_current(&d).unwrap();
    let cfg = GillespieConfig::near_steady_state(&d, j, 1e6 / j, 20.0 * d.tau_sp(), 4).unwrap();
    assert!(gillespie::estimate_event_count(&d, j, &cfg).unwrap() < 1e7);
    let s = gillespie::simulate_gillespie(&d, j, &cfg).unwrap();
    let p = model::steady_state(&d, j).unwrap();
    assert!((s.photons.mean - p.photons).abs() < 0.03 * p.photons, "{} vs {}", s.photons.mean, p.photons);
    assert!((s.excitations.mean - p.excitations).abs() < 0.03 * p.excitations);
}

#[test]
fn gillespie_is_reproducible_per_seed() {
    let d = DeviceParams::preset("toy-a").unwrap();
    let j = 2.0 * model::threshold_current(&d).unwrap();
    let cfg = GillespieConfig::near_steady_state(&d, j, 50.0, 5.0, 9).unwrap();
    let a = gillespie::simulate_gillespie(&d, j, &cfg).unwrap();
    assert_eq!(a, gillespie::simulate_gillespie(&d, j, &cfg).unwrap());
    let other = GillespieConfig { seed: 10, ..cfg };
    assert_ne!(a, gillespie::simulate_gillespie(&d, j, &other).unwrap());
    let e1 = gillespie::simulate_gillespie_ensemble(&d, j, &cfg, 4).unwrap();
    let e2 = gillespie::simulate_gillespie_ensemble(&d, j, &cfg, 4).unwrap();
    assert_eq!(e1, e2);
    assert_eq!(e1.photons.sample_count, e2.photons.sample_count);
}

#[test]
fn observed_trajectory_is_consistent() {
    let d = DeviceParams::preset("toy-a").unwrap();
    let j = 2.0 * model::threshold_current(&d).unwrap();
    let cfg = GillespieConfig::near_steady_state(&d, j, 5.0, 1.0, 2).unwrap();
    let mut rows: Vec<(f64, u64, u64)> = Vec::new();
    let s = gillespie::simulate_gillespie_with(&d, j, &cfg, |t, big_n, n| rows.push((t, big_n, n))).unwrap();
    assert_eq!(rows[0], (0.0, cfg.initial_state.0, cfg.initial_state.1));
    assert!(rows.windows(2).all(|w| w[1].0 >= w[0].0 && w[1].0 <= cfg.t_max));
    // every event changes N or n by at most one quantum each
    for w in rows.windows(2) {
        let dn_big = w[1].1 as i64 - w[0].1 as i64;
        let dn = w[1].2 as i64 - w[0].2 as i64;
        assert!(dn_big.abs() <= 1 && dn.abs() <= 1 && (dn_big, dn) != (0, 0));
    }
    assert_eq!(rows.len() as u64, s.events + 1);
}

#[test]
fn gillespie_budget_guard() {
    let d = DeviceParams::reference();
    let j = 2.0 * model::threshold_current(&d).unwrap();
    let cfg = GillespieConfig::near_steady_state(&d, j, 1e-6, 0.0, 0).unwrap();
    let e = gillespie::simulate_gillespie(&d, j, &cfg).unwrap_err();
    assert_eq!(e.kind(), "BudgetExceeded");
}

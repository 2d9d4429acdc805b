use approx::assert_relative_eq;
use laser_noise::model;
use laser_noise::{DeviceParams, MaterialConstants};
use proptest::prelude::*;

/// Stationary photon number by bisection on the raw rate equations, with N
/// eliminated through dN/dt = 0.
fn brute_force_photons(d: &DeviceParams, j: f64) -> f64 {
    let b = d.beta() / d.tau_sp();
    let big_n = |n: f64| (j + 2.0 * b * d.transparency_excitations() * n) / (1.0 / d.tau_sp() + 2.0 * b * n);
    let dn = |n: f64| {
        let big = big_n(n);
        2.0 * b * (big - d.transparency_excitations()) * n - n / d.tau_cav() + b * big
    };
    let (mut lo, mut hi) = (0.0, 2.0 * j * d.tau_cav() + 1.0);
    assert!(dn(lo) > 0.0 && dn(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dn(mid) > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn device() -> impl Strategy<Value = DeviceParams> {
    (-12.0..-1.0f64, 0.5001..4.0f64, 2.0..6.0f64, -10.0..-6.0f64).prop_map(|(lb, n_t, lbn, lts)| {
        let beta = 10f64.powf(lb);
        DeviceParams::with_transparency_photons(beta, 10f64.powf(lbn) / beta, 10f64.powf(lts), n_t).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_form_matches_brute_force(d in device(), u in -2.0..3.0f64) {
        let j = model::threshold_current(&d).unwrap() * 10f64.powf(u);
        let fast = model::steady_state(&d, j).unwrap().photons;
        let slow = brute_force_photons(&d, j);
        prop_assert!((fast - slow).abs() <= 1e-9 * slow, "{fast} vs {slow}");
    }

    #[test]
    fn threshold_below_twice_transparency_pump(d in device()) {
        let j_th = model::threshold_current(&d).unwrap();
        prop_assert!(j_th > 0.0);
        prop_assert!(j_th < 2.0 * d.transparency_excitations() / d.tau_sp());
    }

    #[test]
    fn inverse_recovers_pump(d in device(), u in -2.0..3.0f64) {
        let j = model::threshold_current(&d).unwrap() * 10f64.powf(u);
        let p = model::steady_state(&d, j).unwrap();
        let back = model::current_for_photon_number(&d, p.photons).unwrap();
        prop_assert!((back - j).abs() <= 1e-10 * j);
    }

    #[test]
    fn photon_number_increases_with_pump(d in device(), u in -2.0..3.0f64) {
        let j = model::threshold_current(&d).unwrap() * 10f64.powf(u);
        let a = model::steady_state(&d, j).unwrap();
        let b = model::steady_state(&d, j * 1.01).unwrap();
        prop_assert!(b.photons > a.photons);
        prop_assert!(b.excitations >= a.excitations * (1.0 - 1e-12));
    }
}

#[test]
fn threshold_sits_at_the_kink() {
    for beta in [1e-5, 1e-3] {
        let d = MaterialConstants::SEMICONDUCTOR.device(beta).unwrap();
        let j_th = model::threshold_current(&d).unwrap();
        let h = 1e-3 * j_th;
        let n = |j: f64| model::steady_state(&d, j).unwrap().photons;
        let peak = (0..1000)
            .map(|i| j_th * 0.5 + i as f64 * h)
            .max_by(|&a, &b| {
                let curv = |j: f64| n(j + h) - 2.0 * n(j) + n(j - h);
                curv(a).total_cmp(&curv(b))
            })
            .unwrap();
        assert!((peak - j_th).abs() <= h, "β = {beta}: kink at {peak}, j_th = {j_th}");
    }
}

#[test]
fn threshold_photon_number_marks_the_slope_change() {
    let d = DeviceParams::reference();
    let j_th = model::threshold_current(&d).unwrap();
    let n_th = model::threshold_photon_number(&d).unwrap();
    let at = model::steady_state(&d, j_th).unwrap().photons;
    // the hyperbola passes through n_th at its centre up to O(β) corrections
    assert_relative_eq!(at, n_th, max_relative = 0.01);
    let below = model::steady_state(&d, 0.5 * j_th).unwrap().photons;
    let above = model::steady_state(&d, 2.0 * j_th).unwrap().photons;
    assert!(below < 0.1 * n_th && above > 10.0 * n_th);
}

#[test]
fn slope_approaches_cavity_lifetime() {
    let d = DeviceParams::reference();
    let j = 100.0 * model::threshold_current(&d).unwrap();
    let a = model::steady_state(&d, j).unwrap().photons;
    let b = model::steady_state(&d, 1.01 * j).unwrap().photons;
    assert_relative_eq!((b - a) / (0.01 * j), d.tau_cav(), max_relative = 1e-3);
}

#[test]
fn transparency_is_a_stationary_point() {
    for name in ["default", "toy-a", "toy-b"] {
        let d = DeviceParams::preset(name).unwrap();
        let j_t = d.transparency_pump();
        let (dn_big, dn) =
            model::rate_residuals(&d, d.transparency_excitations(), d.transparency_photons(), j_t).unwrap();
        let scale = j_t;
        assert!(dn_big.abs() <= 1e-12 * scale && dn.abs() <= 1e-12 * scale, "{name}");
        let p = model::steady_state(&d, j_t).unwrap();
        assert_relative_eq!(p.photons, d.transparency_photons(), max_relative = 1e-9);
        assert_relative_eq!(p.excitations, d.transparency_excitations(), max_relative = 1e-9);
    }
}

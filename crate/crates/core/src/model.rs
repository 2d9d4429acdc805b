//! Stationary rate-equation analysis: transparency, threshold and the
//! light-current characteristic.

use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, ELEMENTARY_CHARGE};
use crate::error::{Error, Result};

/// A stationary operating point of the rate equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Pump rate j in carriers per second.
    pub pump: f64,
    /// Stationary photon number n̄.
    pub photons: f64,
    /// Stationary excitation number N̄.
    pub excitations: f64,
}

impl OperatingPoint {
    pub fn current_amperes(&self) -> f64 {
        self.pump * ELEMENTARY_CHARGE
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeInput { name, value })
    }
}

/// n_T = β N_T τ_cav / τ_sp.
pub fn transparency_photon_number(params: &DeviceParams) -> f64 {
    params.transparency_photons()
}

// The light-current hyperbola is centred on this rate for any parameter set;
// only for lasing devices is it a physical threshold.
fn hyperbola_centre(params: &DeviceParams) -> f64 {
    let n_t = params.transparency_photons();
    params.transparency_pump()
        * ((1.0 + 1.0 / (2.0 * n_t)) - params.beta() * (1.0 + 1.0 / n_t))
}

/// Threshold pump rate j_th in carriers per second.
pub fn threshold_current(params: &DeviceParams) -> Result<f64> {
    params.require_lasing()?;
    Ok(hyperbola_centre(params))
}

/// Photon number at threshold, √((n_T + ½)/(2β)). Assumes β ≪ 1.
pub fn threshold_photon_number(params: &DeviceParams) -> Result<f64> {
    params.require_lasing()?;
    Ok(((params.transparency_photons() + 0.5) / (2.0 * params.beta())).sqrt())
}

/// Excitation number that makes dn/dt vanish at photon number `n`.
fn stationary_excitations(params: &DeviceParams, n: f64) -> f64 {
    let beta_rate = params.beta() / params.tau_sp();
    (n / params.tau_cav()) / (beta_rate * (2.0 * n + 1.0))
        + 2.0 * params.transparency_excitations() * n / (2.0 * n + 1.0)
}

/// Stable stationary state at pump rate `pump` (carriers per second).
pub fn steady_state(params: &DeviceParams, pump: f64) -> Result<OperatingPoint> {
    non_negative("j", pump)?;
    let loss = 1.0 / params.tau_cav();
    let centre = hyperbola_centre(params);
    let offset = pump - centre;
    let linear = offset - loss;
    // discriminant minus linear² is exactly 2·j·loss
    let root = (offset * offset + loss * (2.0 * centre + loss)).sqrt();
    let flux = if linear >= 0.0 {
        0.5 * (linear + root)
    } else {
        pump * loss / (root - linear)
    };
    let photons = flux * params.tau_cav();
    Ok(OperatingPoint {
        pump,
        photons,
        excitations: stationary_excitations(params, photons),
    })
}

/// Pump rate whose stationary photon number is `photons`; inverse of
/// [`steady_state`].
pub fn current_for_photon_number(params: &DeviceParams, photons: f64) -> Result<f64> {
    non_negative("n_bar", photons)?;
    let excitations = stationary_excitations(params, photons);
    // sum of both rate equations: every term is non-negative
    Ok((1.0 - params.beta()) * excitations / params.tau_sp() + photons / params.tau_cav())
}

/// Right-hand sides (dN/dt, dn/dt) of the rate equations.
pub fn rate_residuals(
    params: &DeviceParams,
    excitations: f64,
    photons: f64,
    pump: f64,
) -> Result<(f64, f64)> {
    non_negative("N", excitations)?;
    non_negative("n", photons)?;
    non_negative("j", pump)?;
    let beta_rate = params.beta() / params.tau_sp();
    let stimulated = 2.0 * beta_rate * (excitations - params.transparency_excitations()) * photons;
    let d_excitations = pump - excitations / params.tau_sp() - stimulated;
    let d_photons = stimulated - photons / params.tau_cav() + beta_rate * excitations;
    Ok((d_excitations, d_photons))
}

/// Largest individual flux entering the rate equations at a state; residuals
/// are judged relative to it.
pub fn dominant_flux(params: &DeviceParams, point: &OperatingPoint) -> f64 {
    let beta_rate = params.beta() / params.tau_sp();
    [
        point.pump,
        point.excitations / params.tau_sp(),
        point.photons / params.tau_cav(),
        2.0 * beta_rate * point.excitations * point.photons,
        2.0 * beta_rate * params.transparency_excitations() * point.photons,
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> DeviceParams {
        DeviceParams::preset("toy-a").unwrap()
    }

    #[test]
    fn reference_threshold_current() {
        let d = DeviceParams::reference();
        let j_th = threshold_current(&d).unwrap();
        // (1e9/3e-9)·(4/3 − 1e-5·5/3)
        let expected = 1e9 / 3e-9 * (4.0 / 3.0 - 1e-5 * 5.0 / 3.0);
        assert!((j_th / expected - 1.0).abs() < 1e-14);
        assert!((j_th / 4.444e17 - 1.0).abs() < 1e-3);
        let beta_current = d.beta() * j_th * ELEMENTARY_CHARGE;
        assert!((beta_current / 0.712e-6 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn toy_threshold_current() {
        assert!((threshold_current(&toy()).unwrap() - 650.0).abs() < 1e-9);
    }

    #[test]
    fn small_beta_threshold_limit() {
        let d = DeviceParams::with_transparency_photons(1e-14, 1e18, 3e-9, 1.5).unwrap();
        let limit = d.transparency_pump() * (1.0 + 1.0 / 3.0);
        assert!((threshold_current(&d).unwrap() / limit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_photon_numbers() {
        let d = DeviceParams::reference();
        assert!((threshold_photon_number(&d).unwrap() - 1e5f64.sqrt()).abs() < 1e-9);
        let d = DeviceParams::with_transparency_photons(1e-8, 1e12, 3e-9, 1.5).unwrap();
        assert!((threshold_photon_number(&d).unwrap() - 1e4).abs() < 1e-8);
    }

    #[test]
    fn threshold_rejects_non_lasing() {
        let d = DeviceParams::new(0.1, 10.0, 1.0, 0.4).unwrap();
        assert!(matches!(threshold_current(&d), Err(Error::NonLasingDevice { .. })));
        assert!(threshold_photon_number(&d).is_err());
    }

    #[test]
    fn transparency_pump_gives_transparency_state() {
        for d in [DeviceParams::reference(), toy()] {
            let p = steady_state(&d, d.transparency_pump()).unwrap();
            assert!((p.photons / d.transparency_photons() - 1.0).abs() < 1e-12, "{p:?}");
            assert!((p.excitations / d.transparency_excitations() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_pump_is_dark() {
        let d = DeviceParams::reference();
        let p = steady_state(&d, 0.0).unwrap();
        assert_eq!(p.photons, 0.0);
        assert_eq!(p.excitations, 0.0);
        assert!(steady_state(&d, -1.0).is_err());
    }

    #[test]
    fn twice_threshold_photon_number() {
        let d = DeviceParams::reference();
        let j_th = threshold_current(&d).unwrap();
        let p = steady_state(&d, 2.0 * j_th).unwrap();
        assert!((p.photons / 2e5 - 1.0).abs() < 0.01, "{}", p.photons);
    }

    #[test]
    fn residual_special_cases() {
        let d = toy();
        let (a, b) = rate_residuals(
            &d,
            d.transparency_excitations(),
            d.transparency_photons(),
            d.transparency_pump(),
        )
        .unwrap();
        assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        assert_eq!(rate_residuals(&d, 0.0, 0.0, 7.0).unwrap(), (7.0, 0.0));
        assert!(rate_residuals(&d, -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn inverse_at_transparency_and_threshold() {
        let d = DeviceParams::reference();
        let j = current_for_photon_number(&d, d.transparency_photons()).unwrap();
        assert!((j / d.transparency_pump() - 1.0).abs() < 1e-12);
        let n_th = threshold_photon_number(&d).unwrap();
        let j_th = threshold_current(&d).unwrap();
        let j = current_for_photon_number(&d, n_th).unwrap();
        assert!(((j - j_th) / j_th).abs() < 10.0 / (2.0 * n_th));
        assert!(current_for_photon_number(&d, -0.1).is_err());
    }
}

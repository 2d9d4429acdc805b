//! Device parameters, named presets and the JSON device-file schema.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elementary charge in coulombs, used to present pump rates as currents.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// The four rate-equation parameters of a single-mode laser.
///
/// The transparency photon number `n_T = β N_T τ_cav / τ_sp` is derived once at
/// construction. A device with `n_T <= 0.5` can be built, but it never reaches
/// threshold and the threshold operations reject it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DeviceFile", into = "DeviceFile")]
pub struct DeviceParams {
    beta: f64,
    transparency_excitations: f64,
    tau_sp: f64,
    tau_cav: f64,
    transparency_photons: f64,
}

impl DeviceParams {
    pub fn new(beta: f64, transparency_excitations: f64, tau_sp: f64, tau_cav: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must lie in (0, 1]",
            });
        }
        for (name, value) in [
            ("N_T", transparency_excitations),
            ("tau_sp", tau_sp),
            ("tau_cav", tau_cav),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be positive and finite",
                });
            }
        }
        Ok(Self {
            beta,
            transparency_excitations,
            tau_sp,
            tau_cav,
            transparency_photons: beta * transparency_excitations * tau_cav / tau_sp,
        })
    }

    /// Builds a device from β, N_T, τ_sp and a target transparency photon
    /// number, choosing τ_cav accordingly.
    pub fn with_transparency_photons(
        beta: f64,
        transparency_excitations: f64,
        tau_sp: f64,
        n_t: f64,
    ) -> Result<Self> {
        if !(n_t > 0.0 && n_t.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "n_T",
                value: n_t,
                reason: "must be positive and finite",
            });
        }
        let tau_cav = n_t * tau_sp / (beta * transparency_excitations);
        Self::new(beta, transparency_excitations, tau_sp, tau_cav)
    }

    /// Spontaneous emission factor β.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Excitation number at transparency, N_T.
    pub fn transparency_excitations(&self) -> f64 {
        self.transparency_excitations
    }

    /// Spontaneous relaxation time τ_sp in seconds.
    pub fn tau_sp(&self) -> f64 {
        self.tau_sp
    }

    /// Cavity photon lifetime τ_cav in seconds.
    pub fn tau_cav(&self) -> f64 {
        self.tau_cav
    }

    /// Transparency photon number n_T.
    pub fn transparency_photons(&self) -> f64 {
        self.transparency_photons
    }

    /// Pump rate that holds the gain medium exactly at transparency, N_T/τ_sp.
    pub fn transparency_pump(&self) -> f64 {
        self.transparency_excitations / self.tau_sp
    }

    pub fn is_lasing(&self) -> bool {
        self.transparency_photons > 0.5
    }

    pub fn require_lasing(&self) -> Result<()> {
        if self.is_lasing() {
            Ok(())
        } else {
            Err(Error::NonLasingDevice {
                n_t: self.transparency_photons,
            })
        }
    }

    /// Named preset devices: `default` (alias `reference`), `toy-a`, `toy-b`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "default" | "reference" => Ok(Self::reference()),
            "toy-a" => Self::new(0.1, 500.0, 1.0, 0.02),
            "toy-b" => Self::with_transparency_photons(0.02, 5000.0, 1.0, 1.5),
            other => Err(Error::UnknownPreset(other.to_owned())),
        }
    }

    pub const PRESETS: [&'static str; 3] = ["default", "toy-a", "toy-b"];

    /// Typical semiconductor laser diode: β = 1e-5, N_T = 1e9, τ_sp = 3 ns,
    /// τ_cav = 0.45 ps, giving n_T = 1.5.
    pub fn reference() -> Self {
        Self::with_transparency_photons(1e-5, 1e9, 3e-9, 1.5).expect("reference device is valid")
    }

    /// Loads a device from a JSON file.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: DeviceFile = serde_json::from_str(text)?;
        Self::try_from(file)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("device serializes")
    }
}

/// Material constants of a gain medium, held fixed while the cavity volume
/// (and therefore β) varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialConstants {
    /// β·V in cm³.
    pub beta_volume_cm3: f64,
    /// N_T/V in cm⁻³.
    pub excitation_density_cm3: f64,
    /// τ_sp in seconds.
    pub tau_sp: f64,
    /// Transparency photon number held by choosing τ_cav.
    pub n_t: f64,
}

impl MaterialConstants {
    pub const SEMICONDUCTOR: MaterialConstants = MaterialConstants {
        beta_volume_cm3: 1e-14,
        excitation_density_cm3: 1e18,
        tau_sp: 3e-9,
        n_t: 1.5,
    };

    /// β·N_T, independent of the cavity volume.
    pub fn beta_times_excitations(&self) -> f64 {
        self.beta_volume_cm3 * self.excitation_density_cm3
    }

    /// Device with the given β; N_T scales as 1/β and τ_cav keeps n_T fixed.
    pub fn device(&self, beta: f64) -> Result<DeviceParams> {
        let volume = self.beta_volume_cm3 / beta;
        let n_transparency = self.excitation_density_cm3 * volume;
        DeviceParams::with_transparency_photons(beta, n_transparency, self.tau_sp, self.n_t)
    }
}

impl Default for MaterialConstants {
    fn default() -> Self {
        Self::SEMICONDUCTOR
    }
}

/// On-disk device description.
///
/// Either the canonical `N_T`/`tau_cav_s` pair or a `material` block (or both,
/// if they agree to 1e-6 relative) must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceFile {
    pub beta: f64,
    #[serde(rename = "N_T", default, skip_serializing_if = "Option::is_none")]
    pub n_transparency: Option<f64>,
    pub tau_sp_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_cav_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<MaterialBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialBlock {
    #[serde(rename = "betaV_cm3")]
    pub beta_volume_cm3: f64,
    #[serde(rename = "NT_per_cm3")]
    pub excitation_density_cm3: f64,
    #[serde(rename = "n_T")]
    pub n_t: f64,
}

const CONSISTENCY_TOLERANCE: f64 = 1e-6;

fn relative_mismatch(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

impl TryFrom<DeviceFile> for DeviceParams {
    type Error = Error;

    fn try_from(file: DeviceFile) -> Result<Self> {
        let from_material = match &file.material {
            Some(m) => {
                let material = MaterialConstants {
                    beta_volume_cm3: m.beta_volume_cm3,
                    excitation_density_cm3: m.excitation_density_cm3,
                    tau_sp: file.tau_sp_s,
                    n_t: m.n_t,
                };
                if !(file.beta > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "beta",
                        value: file.beta,
                        reason: "must lie in (0, 1]",
                    });
                }
                Some(material.device(file.beta)?)
            }
            None => None,
        };
        let canonical = match (file.n_transparency, file.tau_cav_s) {
            (Some(n), Some(tau_cav)) => Some(DeviceParams::new(file.beta, n, file.tau_sp_s, tau_cav)?),
            (None, None) => None,
            _ => {
                return Err(Error::InconsistentDevice(
                    "`N_T` and `tau_cav_s` must be given together".into(),
                ))
            }
        };
        match (canonical, from_material) {
            (Some(c), Some(m)) => {
                let dn = relative_mismatch(c.transparency_excitations, m.transparency_excitations);
                let dt = relative_mismatch(c.tau_cav, m.tau_cav);
                if dn > CONSISTENCY_TOLERANCE || dt > CONSISTENCY_TOLERANCE {
                    return Err(Error::InconsistentDevice(format!(
                        "material block disagrees with N_T/tau_cav_s (relative mismatch {:.3e})",
                        dn.max(dt)
                    )));
                }
                Ok(c)
            }
            (Some(c), None) => Ok(c),
            (None, Some(m)) => Ok(m),
            (None, None) => Err(Error::InconsistentDevice(
                "provide `N_T` and `tau_cav_s`, or a `material` block".into(),
            )),
        }
    }
}

impl From<DeviceParams> for DeviceFile {
    fn from(p: DeviceParams) -> Self {
        DeviceFile {
            beta: p.beta,
            n_transparency: Some(p.transparency_excitations),
            tau_sp_s: p.tau_sp,
            tau_cav_s: Some(p.tau_cav),
            material: None,
        }
    }
}

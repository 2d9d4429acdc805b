//! Steady state, threshold and photon-number fluctuations of a single-mode
//! laser described by two coupled rate equations for the excitation number
//! `N` and the photon number `n`:
//!
//! ```text
//! dN/dt = j − N/τ_sp − 2(β/τ_sp)(N − N_T) n
//! dn/dt = 2(β/τ_sp)(N − N_T) n − n/τ_cav + (β/τ_sp) N
//! ```
//!
//! The crate covers the stationary light-current characteristic
//! ([`model`]), the linearized photon-number noise and the "noise threshold"
//! where fluctuations fall to half the thermal value ([`noise`]), two
//! stochastic simulators used as independent checks ([`langevin`],
//! [`gillespie`]), grid sweeps ([`sweeps`]) and the acceptance checks
//! ([`verify`]).

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod device;
pub mod error;
pub mod gillespie;
pub mod langevin;
pub mod model;
pub mod noise;
pub mod report;
pub mod rng;
pub mod roots;
pub mod stats;
pub mod sweeps;
pub mod verify;

pub use device::{DeviceParams, MaterialConstants, ELEMENTARY_CHARGE};
pub use error::{Error, Result};
pub use model::OperatingPoint;
pub use noise::{FluctuationRates, NoiseResult, RegimeTag};
pub use stats::TrajectoryStats;

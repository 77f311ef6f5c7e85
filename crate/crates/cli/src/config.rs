//! Parameter-file parsing (TOML or JSON by extension).
//!
//! A file declares exactly one of the two top-level schemas:
//!
//! ```toml
//! [physical]               # lab units
//! rad_s = false            # frequencies below are Hz (x 2pi applied); true = already rad/s
//! laser_freq = 2.82e14     # Hz: driving laser frequency, scalar or [f1, f2]
//! cavity_freq = 2.82e14    # Hz: cavity resonance
//! mech_freq = 947e3        # Hz: mechanical frequency
//! mass = 145e-12           # kg
//! cavity_length = 25e-3    # m
//! kappa = 215e3            # Hz: cavity decay rate
//! gamma = 140.0            # Hz: mechanical damping rate
//! drive_power = 0.3e-3     # W
//! ndopa_gain_over_kappa = 0.26   # dimensionless, or ndopa_gain in Hz
//! ndopa_phase = 0.0        # rad
//! squeezing_r = 1.0        # dimensionless
//! squeezing_phi = 0.0      # rad
//! bath_temp = 42e-6        # K
//! # detuning = 947e3       # Hz, defaults to mech_freq (red-detuned point)
//! ```
//!
//! ```toml
//! [reduced]                # dimensionless ratios
//! kappa = 215e3            # Hz (or rad/s with rad_s = true)
//! gamma = 140.0            # Hz
//! cooperativity = 62.5     # exactly one of cooperativity / g_over_kappa
//! lambda_over_kappa = 0.26 # dimensionless, in [0, 0.5)
//! theta = 0.0              # rad
//! squeezing_r = 1.0
//! squeezing_phi = 0.0      # rad
//! occupancy = 0.5          # exactly one of occupancy / temperature (K)
//! mech_freq = 947e3        # Hz, required for temperature input or sweeps
//! ```
//!
//! Unknown keys are an error. Scalars apply to both cavity–mirror pairs;
//! `[a, b]` sets them separately.

use serde::Deserialize;
use std::f64::consts::TAU;
use std::path::Path;

use optomech::sweep::SweepBase;
use optomech::{Drive, PhysicalParams, ReducedParams};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrPair {
    One(f64),
    Pair([f64; 2]),
}

impl OneOrPair {
    fn pair(&self) -> [f64; 2] {
        match *self {
            OneOrPair::One(v) => [v, v],
            OneOrPair::Pair(p) => p,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    physical: Option<PhysicalSection>,
    reduced: Option<ReducedSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhysicalSection {
    #[serde(default)]
    rad_s: bool,
    laser_freq: OneOrPair,
    cavity_freq: OneOrPair,
    mech_freq: OneOrPair,
    mass: OneOrPair,
    cavity_length: OneOrPair,
    kappa: OneOrPair,
    gamma: OneOrPair,
    drive_power: OneOrPair,
    ndopa_gain: Option<f64>,
    ndopa_gain_over_kappa: Option<f64>,
    #[serde(default)]
    ndopa_phase: f64,
    #[serde(default)]
    squeezing_r: f64,
    #[serde(default)]
    squeezing_phi: f64,
    bath_temp: OneOrPair,
    detuning: Option<OneOrPair>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReducedSection {
    #[serde(default)]
    rad_s: bool,
    kappa: f64,
    gamma: f64,
    cooperativity: Option<f64>,
    g_over_kappa: Option<f64>,
    #[serde(default)]
    lambda_over_kappa: f64,
    #[serde(default)]
    theta: f64,
    #[serde(default)]
    squeezing_r: f64,
    #[serde(default)]
    squeezing_phi: f64,
    occupancy: Option<OneOrPair>,
    temperature: Option<f64>,
    mech_freq: Option<f64>,
}

fn scale_pair(p: [f64; 2], factor: f64) -> [f64; 2] {
    [p[0] * factor, p[1] * factor]
}

impl PhysicalSection {
    fn resolve(self) -> Result<PhysicalParams, CliError> {
        let f = if self.rad_s { 1.0 } else { TAU };
        let kappa = scale_pair(self.kappa.pair(), f);
        let mech_freq = scale_pair(self.mech_freq.pair(), f);
        let ndopa_gain = match (self.ndopa_gain, self.ndopa_gain_over_kappa) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "set only one of ndopa_gain / ndopa_gain_over_kappa".into(),
                ))
            }
            (Some(g), None) => g * f,
            (None, Some(ratio)) => ratio * f64::sqrt(kappa[0] * kappa[1]),
            (None, None) => 0.0,
        };
        let detuning = match self.detuning {
            Some(d) => scale_pair(d.pair(), f),
            None => mech_freq,
        };
        let params = PhysicalParams {
            laser_freq: scale_pair(self.laser_freq.pair(), f),
            cavity_freq: scale_pair(self.cavity_freq.pair(), f),
            mech_freq,
            mass: self.mass.pair(),
            cavity_length: self.cavity_length.pair(),
            kappa,
            gamma: scale_pair(self.gamma.pair(), f),
            drive_power: self.drive_power.pair(),
            ndopa_gain,
            ndopa_phase: self.ndopa_phase,
            squeezing_r: self.squeezing_r,
            squeezing_phi: self.squeezing_phi,
            bath_temp: self.bath_temp.pair(),
            detuning,
        };
        params
            .validated()
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

impl ReducedSection {
    fn resolve(self) -> Result<ReducedParams, CliError> {
        let f = if self.rad_s { 1.0 } else { TAU };
        let drive = match (self.cooperativity, self.g_over_kappa) {
            (Some(c), None) => Drive::Cooperativity(c),
            (None, Some(g)) => Drive::CouplingRatio(g),
            _ => {
                return Err(CliError::Config(
                    "set exactly one of cooperativity / g_over_kappa".into(),
                ))
            }
        };
        let mech_freq = self.mech_freq.map(|v| v * f);
        let occupancy = match (self.occupancy, self.temperature) {
            (Some(n), None) => n.pair(),
            (None, Some(t)) => {
                let omega = mech_freq.ok_or_else(|| {
                    CliError::Config("temperature input requires mech_freq".into())
                })?;
                let n = optomech::thermal_occupancy(omega, t)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                [n, n]
            }
            _ => {
                return Err(CliError::Config(
                    "set exactly one of occupancy / temperature".into(),
                ))
            }
        };
        let params = ReducedParams {
            kappa: self.kappa * f,
            gamma: self.gamma * f,
            drive,
            lambda_over_kappa: self.lambda_over_kappa,
            theta: self.theta,
            squeezing_r: self.squeezing_r,
            squeezing_phi: self.squeezing_phi,
            occupancy,
            mech_freq,
        };
        params
            .validated()
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Load a parameter file and resolve it into a sweep base (all rates in
/// rad/s, phases normalized).
pub fn load(path: &Path) -> Result<SweepBase, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let file: ConfigFile = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        _ => toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
    };
    match (file.physical, file.reduced) {
        (Some(p), None) => Ok(SweepBase::Physical(p.resolve()?)),
        (None, Some(r)) => Ok(SweepBase::Reduced(r.resolve()?)),
        (Some(_), Some(_)) => Err(CliError::Config(
            "declare exactly one of [physical] / [reduced], not both".into(),
        )),
        (None, None) => Err(CliError::Config(
            "missing parameterization: declare [physical] or [reduced]".into(),
        )),
    }
}

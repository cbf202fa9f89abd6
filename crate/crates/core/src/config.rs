//! Scalar model and solver parameters shared by every stage of the pipeline.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise power spectral density at 290 K, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Thermal noise power over `bandwidth_hz`, plus a receiver noise figure.
pub fn thermal_noise_watts(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    dbm_to_watts(THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db)
}

/// Log-distance path loss with lognormal shadowing:
/// `PL[dB] = intercept + exponent * 10 log10(d) + xi`, `xi ~ N(0, shadow_std^2)` in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    pub intercept_db: f64,
    pub exponent: f64,
    pub shadow_std_db: f64,
}

impl PathLossParams {
    pub const LOS_28GHZ: Self = Self { intercept_db: 61.4, exponent: 2.0, shadow_std_db: 5.8 };
    pub const NLOS_28GHZ: Self = Self { intercept_db: 72.0, exponent: 2.92, shadow_std_db: 8.7 };

    /// Path loss in dB at distance `d` (already floored) with shadowing draw `xi_db`.
    pub fn loss_db(&self, d: f64, xi_db: f64) -> f64 {
        self.intercept_db + self.exponent * 10.0 * d.log10() + xi_db
    }
}

/// How a link is classified as line-of-sight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LosModel {
    /// Bernoulli draw with `p_LOS(d) = exp(-d / decay_m)`.
    Exponential { decay_m: f64 },
    AllLos,
    AllNlos,
}

impl LosModel {
    pub fn los_probability(&self, d: f64) -> f64 {
        match *self {
            LosModel::Exponential { decay_m } => (-d / decay_m).exp(),
            LosModel::AllLos => 1.0,
            LosModel::AllNlos => 0.0,
        }
    }
}

/// Order in which the greedy scheme visits FDCs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FdcOrdering {
    /// Largest total interference power first.
    #[default]
    InterferenceDescending,
    Identity,
    /// Uniformly shuffled with the given seed.
    Random { seed: u64 },
}

/// How statistical interference gains treat the interferer's beamformer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceMode {
    /// Use the interferer's beamformer for the current small-scale realization.
    #[default]
    Instantaneous,
    /// Additionally average over `draws` independent interferer fading draws.
    Averaged { draws: usize },
}

/// Initial bisection bracket of a degraded solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketMode {
    /// Worst and best per-user SINR under maximum and minimum cross interference.
    #[default]
    Interference,
    /// The interference bracket intersected with bounds that use the fixed FDCs'
    /// actual allocations; the lower end carries a witness permutation.
    Tightened,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub num_fdcs: usize,
    pub users_per_fdc: usize,
    pub antennas: usize,
    /// Carrier wavelength, meters.
    pub wavelength_m: f64,
    /// Inter-element spacing of the ULA, meters.
    pub element_spacing_m: f64,
    /// Per-BS transmit power, watts.
    pub tx_power_w: f64,
    /// Receiver noise power per FRB, watts.
    pub noise_power_w: f64,
    /// Radius of the circular deployment area centered at the origin, meters.
    pub area_radius_m: f64,
    /// Users are dropped uniformly within this radius of their serving BS.
    pub serving_radius_m: f64,
    pub num_scatterers: usize,
    pub bisection_tol: f64,
    pub greedy_tol: f64,
    pub max_greedy_rounds: usize,
    /// After the bisection of a degraded solve, raise the target FDC's own worst
    /// SINR while keeping every other subsystem link at the bisection optimum.
    pub refine_target: bool,
    pub bracket: BracketMode,
    pub los_model: LosModel,
    pub pathloss_los: PathLossParams,
    pub pathloss_nlos: PathLossParams,
    pub fdc_ordering: FdcOrdering,
    pub interference_mode: InterferenceMode,
    pub rng_seed: u64,
}

pub const DEFAULT_CARRIER_HZ: f64 = 28e9;
pub const DEFAULT_FRB_BANDWIDTH_HZ: f64 = 100e6;

impl Default for SystemConfig {
    fn default() -> Self {
        let wavelength = SPEED_OF_LIGHT / DEFAULT_CARRIER_HZ;
        Self {
            num_fdcs: 10,
            users_per_fdc: 3,
            antennas: 16,
            wavelength_m: wavelength,
            element_spacing_m: wavelength / 2.0,
            tx_power_w: 1.0,
            noise_power_w: thermal_noise_watts(DEFAULT_FRB_BANDWIDTH_HZ, 0.0),
            area_radius_m: 500.0,
            serving_radius_m: 50.0,
            num_scatterers: 3,
            bisection_tol: 1e-3,
            greedy_tol: 1e-3,
            max_greedy_rounds: 100,
            refine_target: true,
            bracket: BracketMode::Interference,
            los_model: LosModel::Exponential { decay_m: 67.1 },
            pathloss_los: PathLossParams::LOS_28GHZ,
            pathloss_nlos: PathLossParams::NLOS_28GHZ,
            fdc_ordering: FdcOrdering::InterferenceDescending,
            interference_mode: InterferenceMode::Instantaneous,
            rng_seed: 0,
        }
    }
}

impl SystemConfig {
    pub fn num_links(&self) -> usize {
        self.num_fdcs * self.users_per_fdc
    }

    /// The additive noise term `N_a sigma^2 / P` of the SINR denominator.
    pub fn noise_term(&self) -> f64 {
        self.antennas as f64 * self.noise_power_w / self.tx_power_w
    }

    pub fn with_tx_power_dbm(mut self, dbm: f64) -> Self {
        self.tx_power_w = dbm_to_watts(dbm);
        self
    }

    /// Phase advance per antenna element for a path at azimuth `phi`.
    pub fn phase_step(&self, phi: f64) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength_m * self.element_spacing_m * phi.sin()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let counts = [
            ("num_fdcs", self.num_fdcs),
            ("users_per_fdc", self.users_per_fdc),
            ("antennas", self.antennas),
            ("num_scatterers", self.num_scatterers),
            ("max_greedy_rounds", self.max_greedy_rounds),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(ConfigError::Invalid(format!("{name} must be at least 1")));
            }
        }
        let positive = [
            ("wavelength_m", self.wavelength_m),
            ("element_spacing_m", self.element_spacing_m),
            ("tx_power_w", self.tx_power_w),
            ("noise_power_w", self.noise_power_w),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::Invalid(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        // A zero radius is allowed and collapses the geometry onto the origin.
        for (name, v) in [("area_radius_m", self.area_radius_m), ("serving_radius_m", self.serving_radius_m)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::Invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [("bisection_tol", self.bisection_tol), ("greedy_tol", self.greedy_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(ConfigError::Invalid(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        for (name, p) in [("pathloss_los", &self.pathloss_los), ("pathloss_nlos", &self.pathloss_nlos)] {
            if !(p.intercept_db.is_finite() && p.exponent.is_finite() && p.shadow_std_db >= 0.0) {
                return Err(ConfigError::Invalid(format!("{name} has non-finite or negative parameters")));
            }
        }
        if let LosModel::Exponential { decay_m } = self.los_model {
            if decay_m.is_nan() || decay_m <= 0.0 {
                return Err(ConfigError::Invalid("los_model.decay_m must be > 0".into()));
            }
        }
        if let InterferenceMode::Averaged { draws } = self.interference_mode {
            if draws == 0 {
                return Err(ConfigError::Invalid("interference_mode.draws must be >= 1".into()));
            }
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), source: e })?;
        Self::from_toml_str(&text)
    }
}

//! Versioned JSON configuration with environment overrides.
//!
//! `POSMET_NOISE__PREP_FIDELITY=0.9` sets `noise.prep_fidelity`: the
//! prefix is stripped, `__` separates path segments, and segments are
//! lowercased. Values parse as JSON and fall back to plain strings.

use std::path::Path;

use posmet_core::hardware::{Confusion, DeviceParams, NoiseModel, StarkDrive};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::AppError;

pub const DEFAULT_CONFIG: &str = include_str!("../config/default.json");
pub const CONFIG_VERSION: u32 = 1;
pub const ENV_PREFIX: &str = "POSMET_";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    pub device: DeviceParams,
    pub noise: NoiseConfig,
    pub field: FieldConfig,
    pub experiment: ExperimentConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub prep_fidelity: f64,
    pub readout_fidelity_qubit: f64,
    pub readout_fidelity_antiqubit: f64,
    pub stark_imperfection: StarkConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarkConfig {
    pub enabled: bool,
    pub detuning_mhz: f64,
    pub drive_phase_rad: f64,
    pub step_ns: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    /// Rotation rate of the applied field, |δ| = Ω_x = Ω_y.
    pub rate_mhz: f64,
    pub max_pulse_ns: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alpha_points: usize,
    pub shots_per_point: u64,
    pub seed: u64,
    pub readout_correction: bool,
    pub bootstrap_resamples: u64,
    /// 0 picks the available parallelism.
    pub threads: usize,
}

impl Config {
    pub fn default_config() -> Config {
        Config::from_str_with_env(DEFAULT_CONFIG, std::iter::empty()).expect("shipped config is valid")
    }

    /// Reads `path` (or the shipped default), then applies environment
    /// overrides and validates.
    pub fn load<I>(path: Option<&Path>, env: I) -> Result<Config, AppError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| AppError::Config(format!("{}: {e}", p.display())))?;
                Config::from_str_with_env(&text, env).map_err(|e| match e {
                    AppError::Config(m) => AppError::Config(format!("{}: {m}", p.display())),
                    other => other,
                })
            }
            None => Config::from_str_with_env(DEFAULT_CONFIG, env),
        }
    }

    pub fn from_str_with_env<I>(text: &str, env: I) -> Result<Config, AppError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut value: Value = serde_json::from_str(text).map_err(|e| AppError::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        for (k, v) in env {
            if let Some(rest) = k.strip_prefix(ENV_PREFIX) {
                apply_override(&mut value, rest, &v)?;
            }
        }
        let cfg: Config = serde_json::from_value(value).map_err(|e| AppError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), AppError> {
        let bad = |field: &str, why: &str| Err(AppError::Config(format!("{field}: {why}")));
        if self.version != CONFIG_VERSION {
            return bad("version", &format!("expected {CONFIG_VERSION}, found {}", self.version));
        }
        self.device.validate().map_err(|e| AppError::Config(format!("device: {e}")))?;
        let n = &self.noise;
        if !(0.25..=1.0).contains(&n.prep_fidelity) {
            return bad("noise.prep_fidelity", "must lie in [0.25, 1]");
        }
        for (f, v) in [("noise.readout_fidelity_qubit", n.readout_fidelity_qubit), ("noise.readout_fidelity_antiqubit", n.readout_fidelity_antiqubit)] {
            // 0.5 makes the confusion matrix singular
            if !(v > 0.5 && v <= 1.0) {
                return bad(f, "must lie in (0.5, 1]");
            }
        }
        let s = &n.stark_imperfection;
        if !(s.detuning_mhz.is_finite() && s.detuning_mhz != 0.0) {
            return bad("noise.stark_imperfection.detuning_mhz", "must be nonzero");
        }
        if !(s.step_ns > 0.0 && s.step_ns.is_finite()) {
            return bad("noise.stark_imperfection.step_ns", "must be positive");
        }
        if !s.drive_phase_rad.is_finite() {
            return bad("noise.stark_imperfection.drive_phase_rad", "must be finite");
        }
        if !(self.field.rate_mhz > 0.0 && self.field.rate_mhz.is_finite()) {
            return bad("field.rate_mhz", "must be positive");
        }
        if !(self.field.max_pulse_ns > 0.0 && self.field.max_pulse_ns.is_finite()) {
            return bad("field.max_pulse_ns", "must be positive");
        }
        let e = &self.experiment;
        if e.alpha_points < 6 {
            return bad("experiment.alpha_points", "need at least 6 points");
        }
        if e.shots_per_point == 0 {
            return bad("experiment.shots_per_point", "must be at least 1");
        }
        Ok(())
    }

    pub fn stark_drive(&self) -> StarkDrive {
        let s = &self.noise.stark_imperfection;
        StarkDrive { detuning_ghz: s.detuning_mhz * 1e-3, field_ghz: self.field.rate_mhz * 1e-3, phase: s.drive_phase_rad, step_ns: s.step_ns }
    }

    pub fn noise_model(&self) -> NoiseModel {
        let n = &self.noise;
        NoiseModel {
            prep_fidelity: n.prep_fidelity,
            readout_qubit: Confusion::symmetric(n.readout_fidelity_qubit),
            readout_antiqubit: Confusion::symmetric(n.readout_fidelity_antiqubit),
            stark_imperfection: n.stark_imperfection.enabled.then(|| self.stark_drive()),
        }
    }

    /// Largest α one field pulse can reach.
    pub fn max_alpha(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.field.rate_mhz * 1e-3 * self.field.max_pulse_ns
    }

    pub fn threads(&self) -> usize {
        match self.experiment.threads {
            0 => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            t => t,
        }
    }
}

fn apply_override(root: &mut Value, key: &str, raw: &str) -> Result<(), AppError> {
    let path: Vec<String> = key.split("__").map(|s| s.to_ascii_lowercase()).collect();
    let mut node = root;
    for seg in &path {
        node = node
            .get_mut(seg.as_str())
            .ok_or_else(|| AppError::Config(format!("{ENV_PREFIX}{key}: no config key {}", path.join("."))))?;
    }
    *node = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok(())
}

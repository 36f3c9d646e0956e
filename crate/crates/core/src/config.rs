//! Kernel configuration and the dotted-key override mechanism used by the
//! CLI's repeated `--set key=value` flag.

use thiserror::Error;

use crate::prediction::PredictionConfig;
use crate::representation::RepresentationConfig;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KernelConfig {
    pub representation: RepresentationConfig,
    /// Indicator-delta tolerance for the Active/Passive/Stable partition.
    pub eps: f64,
    pub prediction: PredictionConfig,
}

impl KernelConfig {
    pub fn new() -> Self {
        Self {
            representation: RepresentationConfig::default(),
            eps: crate::characterization::DEFAULT_EPS,
            prediction: PredictionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("expected KEY=VALUE, got `{0}`")]
    BadAssignment(String),
}

impl KernelConfig {
    /// Apply one `KEY=VALUE` assignment as passed to `--set`.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::BadAssignment(assignment.to_string()))?;
        self.set(key.trim(), value.trim())
    }

    /// Set one dotted configuration key.
    ///
    /// Keys: `proximity.dMax`, `proximity.tMax`, `proximity.linkThreshold`,
    /// `characterization.eps`, `automaton.emergeI1`, `automaton.strongI1`,
    /// `automaton.strongI2`, `automaton.declineI1`, `automaton.retireI1`,
    /// `prediction.k`, `prediction.alpha`, `prediction.horizon`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |reason: &str| ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        };
        match key {
            "proximity.dMax" => {
                let v: u32 = value.parse().map_err(|_| bad("not an unsigned integer"))?;
                if v == 0 {
                    return Err(bad("must be positive"));
                }
                self.representation.proximity.d_max = v;
            }
            "proximity.tMax" => {
                let v: u64 = value.parse().map_err(|_| bad("not an unsigned integer"))?;
                if v == 0 {
                    return Err(bad("must be positive"));
                }
                self.representation.proximity.t_max = v;
            }
            "proximity.linkThreshold" => {
                let v: f64 = value.parse().map_err(|_| bad("not a number"))?;
                if !(0.0..1.0).contains(&v) {
                    return Err(bad("must be in [0, 1)"));
                }
                self.representation.proximity.link_threshold = v;
            }
            "characterization.eps" => {
                let v: f64 = value.parse().map_err(|_| bad("not a number"))?;
                if v <= 0.0 {
                    return Err(bad("must be positive"));
                }
                self.eps = v;
            }
            "automaton.emergeI1" => self.representation.automaton.emerge_i1 = parse_f64(key, value)?,
            "automaton.strongI1" => self.representation.automaton.strong_i1 = parse_f64(key, value)?,
            "automaton.strongI2" => self.representation.automaton.strong_i2 = parse_f64(key, value)?,
            "automaton.declineI1" => self.representation.automaton.decline_i1 = parse_f64(key, value)?,
            "automaton.retireI1" => self.representation.automaton.retire_i1 = parse_f64(key, value)?,
            "prediction.k" => {
                let v: usize = value.parse().map_err(|_| bad("not an unsigned integer"))?;
                if v == 0 {
                    return Err(bad("must be at least 1"));
                }
                self.prediction.k = v;
            }
            "prediction.alpha" => {
                let v: f64 = value.parse().map_err(|_| bad("not a number"))?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(bad("must be in [0, 1]"));
                }
                self.prediction.alpha = v;
            }
            "prediction.horizon" => {
                let v: u64 = value.parse().map_err(|_| bad("not an unsigned integer"))?;
                if v == 0 {
                    return Err(bad("must be positive"));
                }
                self.prediction.horizon = v;
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: "not a number".to_string(),
    })
}

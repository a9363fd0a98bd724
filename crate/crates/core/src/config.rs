//! Experiment configuration file (JSON) and its content hash.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::montecarlo::{DetectorId, SelectorId};
use crate::scenario::ScenarioConfig;

/// Full experiment description. Every section is optional and unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub detectors: DetectorsConfig,
    pub montecarlo: MonteCarloConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorsConfig {
    pub enabled: Vec<DetectorId>,
    /// Support estimators scored in the RMSE sweep.
    pub selectors: Vec<SelectorId>,
}

impl Default for DetectorsConfig {
    fn default() -> Self {
        Self {
            enabled: DetectorId::ALL.to_vec(),
            selectors: SelectorId::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub seed: u64,
    /// Worker threads; results do not depend on it, so it is left out of reports.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
    pub pfa: f64,
    pub calibration_trials: usize,
    pub pd_trials: usize,
    pub rmse_trials: usize,
    pub sinr_grid_db: Vec<f64>,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            workers: None,
            pfa: 1e-3,
            calibration_trials: 100_000,
            pd_trials: 1000,
            rmse_trials: 1000,
            sinr_grid_db: default_sinr_grid(),
        }
    }
}

/// 0 to 24 dB in 2 dB steps.
pub fn default_sinr_grid() -> Vec<f64> {
    (0..=12).map(|i| 2.0 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        let mc = &self.montecarlo;
        if !(mc.pfa > 0.0 && mc.pfa < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "pfa {} outside (0, 1)",
                mc.pfa
            )));
        }
        if mc.calibration_trials == 0 || mc.pd_trials == 0 || mc.rmse_trials == 0 {
            return Err(Error::InvalidConfig("trial counts must be positive".into()));
        }
        if mc.workers == Some(0) {
            return Err(Error::InvalidConfig("workers must be positive".into()));
        }
        if mc.sinr_grid_db.is_empty()
            || mc
                .sinr_grid_db
                .iter()
                .any(|x| x.is_nan() || *x == f64::INFINITY)
        {
            return Err(Error::InvalidConfig(
                "SINR grid must be non-empty and contain numbers below +inf".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        if !self.detectors.enabled.iter().all(|d| seen.insert(*d)) {
            return Err(Error::InvalidConfig("detector listed twice".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !self.detectors.selectors.iter().all(|d| seen.insert(*d)) {
            return Err(Error::InvalidConfig("selector listed twice".into()));
        }
        Ok(())
    }

    /// Hash identifying the statistical model thresholds are valid for.
    pub fn config_hash(&self) -> String {
        scenario_hash(&self.scenario)
    }
}

/// SHA-256 (hex) of the canonical JSON form of a scenario.
pub fn scenario_hash(scenario: &ScenarioConfig) -> String {
    let canonical = serde_json::to_vec(scenario).expect("scenario serializes");
    hex::encode(Sha256::digest(&canonical))
}

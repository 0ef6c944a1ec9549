//! Run configuration: a TOML file with one table per stage plus shock and
//! run sections. CLI flags override file values. Unknown keys are errors.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Stage1Params, Stage2Params, Stage3Params};
use crate::shocks::ShockProcessConfig;

/// Environment variable naming a default config file, consulted when
/// `--config` is absent.
pub const CONFIG_ENV_VAR: &str = "OLG_HEALTH_CONFIG";

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub stage: Option<String>,
    pub horizon: Option<usize>,
    pub l0: Option<f64>,
    pub lambda0: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Parsed configuration file. Every section is optional; missing sections
/// fall back to the baseline parameterizations.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub stage1: Option<Stage1Params>,
    pub stage2: Option<Stage2Params>,
    pub stage3: Option<Stage3Params>,
    pub shocks: Option<ShockProcessConfig>,
    pub run: Option<RunSection>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads `--config` if given, else the env-var default, else an empty
    /// config (baselines apply).
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        if let Some(p) = explicit {
            return Self::from_path(p);
        }
        if let Ok(p) = std::env::var(CONFIG_ENV_VAR) {
            return Self::from_path(Path::new(&p));
        }
        Ok(RunConfig::default())
    }

    fn validate(&self) -> Result<()> {
        if let Some(p) = self.stage1 {
            p.validate()?;
        }
        if let Some(p) = self.stage2 {
            p.validate()?;
        }
        if let Some(p) = self.stage3 {
            p.validate()?;
        }
        if let Some(s) = &self.shocks {
            s.validate()?;
        }
        if let Some(r) = &self.run {
            if r.horizon == Some(0) {
                return Err(Error::config("run.horizon must be >= 1"));
            }
        }
        Ok(())
    }

    pub fn stage1_params(&self) -> Stage1Params {
        self.stage1.unwrap_or_else(Stage1Params::baseline)
    }

    pub fn stage2_params(&self) -> Stage2Params {
        self.stage2.unwrap_or_else(Stage2Params::baseline)
    }

    pub fn stage3_params(&self) -> Stage3Params {
        self.stage3.unwrap_or_else(Stage3Params::baseline)
    }

    pub fn shock_config(&self) -> ShockProcessConfig {
        self.shocks
            .unwrap_or_else(|| ShockProcessConfig::constant(0.0))
    }
}

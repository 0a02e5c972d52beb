//! Declarative run configuration, parsed from a TOML key-value file.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelId {
    Ballistic,
    UngmGaussian,
    UngmRayleigh,
    LinearGaussian,
}

impl ModelId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelId::Ballistic => "ballistic",
            ModelId::UngmGaussian => "ungm-gaussian",
            ModelId::UngmRayleigh => "ungm-rayleigh",
            ModelId::LinearGaussian => "linear-gaussian",
        }
    }
}

/// One experiment: model and case binding, ensemble sizes, seed, outputs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelId,
    /// Ballistic noise case "1".."4"; "scalar" or "two-state" for the
    /// linear-Gaussian model; absent otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub n_particles: usize,
    pub m_sequences: usize,
    pub horizon_steps: usize,
    pub seed: u64,
    /// Also run the true-state reference bound and the quality metric.
    #[serde(default)]
    pub emit_theory: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Retain per-step D blocks in the in-memory report.
    #[serde(default)]
    pub emit_history: bool,
    /// Worker threads for the sequence fan-out; default uses all cores.
    /// Reports are identical for any worker count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles < 1 {
            return Err(Error::Config("n_particles must be at least 1".into()));
        }
        if self.m_sequences < 1 {
            return Err(Error::Config("m_sequences must be at least 1".into()));
        }
        if self.horizon_steps < 1 {
            return Err(Error::Config("horizon_steps must be at least 1".into()));
        }
        match (self.model, self.case.as_deref()) {
            (ModelId::Ballistic, Some("1" | "2" | "3" | "4")) => Ok(()),
            (ModelId::Ballistic, other) => Err(Error::Config(format!(
                "case: ballistic requires \"1\"..\"4\", got {other:?}"
            ))),
            (ModelId::LinearGaussian, None | Some("scalar" | "two-state")) => Ok(()),
            (ModelId::LinearGaussian, Some(other)) => Err(Error::Config(format!(
                "case: linear-gaussian accepts \"scalar\" or \"two-state\", got \"{other}\""
            ))),
            (_, None) => Ok(()),
            (model, Some(other)) => Err(Error::Config(format!(
                "case: {} takes no case, got \"{other}\"",
                model.as_str()
            ))),
        }
    }

    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serializes")
    }
}

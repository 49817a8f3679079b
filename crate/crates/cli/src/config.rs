//! Solver settings from TOML.
//!
//! ```toml
//! preset = "full"          # or "desk" (the default)
//! seed = 7
//! iteration_count = 20
//! max_bad_iterations = 100000
//! max_time_seconds = 1800
//! ls_attempts = 650         # omit for 50 * (r + m)
//! ```
//!
//! Every key is optional; explicit keys override the preset.

use std::path::Path;

use mdmsop_core::VnsConfig;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// 5 restarts, 10000 bad iterations, 60 s.
    #[default]
    Desk,
    /// 20 restarts, 100000 bad iterations, 30 min.
    Full,
}

impl Preset {
    pub fn config(self) -> VnsConfig {
        match self {
            Preset::Desk => VnsConfig::desk(),
            Preset::Full => VnsConfig::full(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub iteration_count: Option<usize>,
    pub max_bad_iterations: Option<u64>,
    pub max_time_seconds: Option<f64>,
    pub ls_attempts: Option<usize>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("bad config: {0}")]
    Invalid(#[from] mdmsop_core::vns::ConfigError),
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The preset with explicit keys applied, validated.
    pub fn resolve(&self) -> Result<VnsConfig, ConfigError> {
        let mut cfg = self.preset.unwrap_or_default().config();
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.iteration_count {
            cfg.iteration_count = v;
        }
        if let Some(v) = self.max_bad_iterations {
            cfg.max_bad_iterations = v;
        }
        if let Some(v) = self.max_time_seconds {
            cfg.max_time_secs = v;
        }
        if self.ls_attempts.is_some() {
            cfg.ls_attempts = self.ls_attempts;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

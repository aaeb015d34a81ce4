use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::suite::Suite;

pub const DEFAULT_TOLERANCES: &str = include_str!("../config/tolerances.toml");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid tolerance file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("no tolerance `{key}` for suite `{suite}`")]
    Missing { suite: String, key: String },
}

#[derive(Debug, Clone, Deserialize)]
pub struct RunDefaults {
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Tolerances {
    pub run: RunDefaults,
    #[serde(flatten)]
    suites: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(skip)]
    overrides: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::parse(DEFAULT_TOLERANCES).expect("embedded tolerance file parses")
    }
}

impl Tolerances {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// Replace every non-control tolerance of `suite` with `tol`.
    pub fn override_suite(&mut self, suite: Suite, tol: f64) {
        self.overrides.insert(suite.name().to_string(), tol);
    }

    pub fn get(&self, suite: Suite, key: &str) -> Result<f64, ConfigError> {
        let name = suite.name();
        let base = self
            .suites
            .get(name)
            .and_then(|m| m.get(key))
            .copied()
            .ok_or_else(|| ConfigError::Missing { suite: name.to_string(), key: key.to_string() })?;
        match self.overrides.get(name) {
            Some(t) if !key.ends_with("_control") => Ok(*t),
            _ => Ok(base),
        }
    }

    /// Every key the built-in file defines for `suite` must be present.
    pub fn validate(&self, suite: Suite) -> Result<(), ConfigError> {
        for key in Tolerances::default().keys(suite) {
            self.get(suite, &key)?;
        }
        Ok(())
    }

    pub fn keys(&self, suite: Suite) -> Vec<String> {
        self.suites.get(suite.name()).map(|m| m.keys().cloned().collect()).unwrap_or_default()
    }
}

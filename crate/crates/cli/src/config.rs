use std::collections::BTreeMap;
use std::path::Path;

use orthwalk::fitting::Tolerances;
use serde::Deserialize;

use crate::error::CliError;

/// Optional TOML configuration: extra tolerance profiles and resource caps.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub limits: Limits,
    /// Named profiles; these override built-in profiles of the same name.
    #[serde(default)]
    pub profiles: BTreeMap<String, Tolerances>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Limits {
    /// Largest DP grid, in cells, before enumeration refuses to run.
    pub max_cells: u64,
    pub verify_max_n_2d: usize,
    pub verify_max_n_3d: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_cells: 50_000_000, verify_max_n_2d: 400, verify_max_n_3d: 80 }
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn profile(&self, name: &str) -> Result<Tolerances, CliError> {
        self.profiles
            .get(name)
            .copied()
            .or_else(|| Tolerances::profile(name))
            .ok_or_else(|| CliError::Config(format!("unknown tolerance profile {name:?}")))
    }

    pub fn default_max_n(&self, dimension: usize) -> usize {
        if dimension <= 2 {
            self.limits.verify_max_n_2d
        } else {
            self.limits.verify_max_n_3d
        }
    }
}

//! Run configuration: defaults, TOML file, command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::FeasibilityOptions;
use crate::realize::RealizeOptions;
use crate::volume::VolumeOptions;

/// Environment variable naming a configuration file.
pub const CONFIG_ENV: &str = "SOLIDTORUS_CONFIG";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[default]
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub gradient: f64,
    pub residual: f64,
    pub zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { gradient: 1e-10, residual: 1e-9, zero: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub feasibility_iterations: usize,
    pub volume_iterations: usize,
    pub node_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { feasibility_iterations: 1000, volume_iterations: 500, node_budget: 2_000_000 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub mode: Mode,
    pub tolerances: Tolerances,
    pub limits: Limits,
    /// Normal-curve crossing bound; defaults to four times the number of edges.
    pub bound: Option<u32>,
    pub outputs: Outputs,
}

impl Config {
    pub fn from_toml(s: &str) -> Result<Self> {
        let c: Config = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Explicit path, else the environment variable, else defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        if let Some(p) = explicit {
            return Self::read(p);
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::read(Path::new(&p)),
            _ => Ok(Config::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [("gradient", t.gradient), ("residual", t.residual), ("zero", t.zero)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerance '{name}' must be positive, got {v}")));
            }
        }
        let l = &self.limits;
        if l.feasibility_iterations == 0 || l.volume_iterations == 0 || l.node_budget == 0 {
            return Err(Error::Config("iteration caps must be at least 1".into()));
        }
        if self.bound == Some(0) {
            return Err(Error::Config("bound must be at least 1".into()));
        }
        Ok(())
    }

    pub fn feasibility(&self) -> FeasibilityOptions {
        FeasibilityOptions {
            exact: self.mode == Mode::Exact,
            zero_tol: self.tolerances.zero,
            max_iterations: self.limits.feasibility_iterations,
            curve_bound: self.bound,
            node_budget: self.limits.node_budget,
        }
    }

    pub fn volume(&self) -> VolumeOptions {
        VolumeOptions {
            gradient_tol: self.tolerances.gradient,
            max_iterations: self.limits.volume_iterations,
            ..VolumeOptions::default()
        }
    }

    pub fn realize(&self) -> RealizeOptions {
        RealizeOptions { feasibility: self.feasibility(), volume: self.volume() }
    }
}

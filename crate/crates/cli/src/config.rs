//! Run configuration from a flat TOML file and command-line flags.

use std::fs;
use std::path::Path;

use clap::Args;
use diminishing::stats::{ProcessKind, RunConfig};
use serde::Deserialize;

use crate::{CliError, Result};

/// Environment variable holding the default seed.
pub const SEED_VAR: &str = "DIMINISH_SEED";
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Every run setting, each optional. Serves both as the config file schema
/// and as the flag set; flags win over file values.
#[derive(Args, Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// interval, cube, simplex, polygon, or pentagon (polygon with k = 5)
    #[arg(long)]
    pub process: Option<String>,
    /// Steps per replica
    #[arg(long)]
    pub n: Option<u64>,
    /// Independent replicas [default: 1]
    #[arg(long)]
    pub replicas: Option<u64>,
    /// Base seed [default: $DIMINISH_SEED, else 20240601]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Interval law parameter c in [0, 1] [default: 0.5]
    #[arg(long)]
    pub c: Option<f64>,
    /// Interval law exponent delta > 0 [default: 1]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Dimension of the cube or simplex
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of polygon sides
    #[arg(long)]
    pub k: Option<usize>,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text)
            .map_err(|e| CliError::Config(format!("invalid config: {}", e.message())))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// `self` with every setting present in `top` replaced.
    pub fn overlay(self, top: &RawConfig) -> RawConfig {
        RawConfig {
            process: top.process.clone().or(self.process),
            n: top.n.or(self.n),
            replicas: top.replicas.or(self.replicas),
            seed: top.seed.or(self.seed),
            c: top.c.or(self.c),
            delta: top.delta.or(self.delta),
            d: top.d.or(self.d),
            k: top.k.or(self.k),
        }
    }

    fn reject(&self, keys: &[&str], process: &str) -> Result<()> {
        let given = [
            ("c", self.c.is_some()),
            ("delta", self.delta.is_some()),
            ("d", self.d.is_some()),
            ("k", self.k.is_some()),
        ];
        match given.iter().find(|(key, set)| *set && keys.contains(key)) {
            Some((key, _)) => Err(CliError::Config(format!(
                "key `{key}` does not apply to process {process}"
            ))),
            None => Ok(()),
        }
    }

    /// Fills defaults and validates. `env_seed` is the value of
    /// [`SEED_VAR`], used when no seed was given.
    pub fn resolve(&self, env_seed: Option<&str>) -> Result<RunConfig> {
        let process = self.process.as_deref().ok_or_else(|| missing("process"))?;
        let n = self.n.ok_or_else(|| missing("n"))?;
        let seed = resolve_seed(self.seed, env_seed)?;
        let kind = match process {
            "interval" => {
                self.reject(&["d", "k"], process)?;
                ProcessKind::Interval {
                    c: self.c.unwrap_or(0.5),
                    delta: self.delta.unwrap_or(1.0),
                }
            }
            "cube" | "simplex" => {
                self.reject(&["c", "delta", "k"], process)?;
                let d = self.d.ok_or_else(|| missing("d"))?;
                if process == "cube" {
                    ProcessKind::Cube { d }
                } else {
                    ProcessKind::Simplex { d }
                }
            }
            "polygon" => {
                self.reject(&["c", "delta", "d"], process)?;
                ProcessKind::Polygon {
                    k: self.k.ok_or_else(|| missing("k"))?,
                }
            }
            "pentagon" => {
                self.reject(&["c", "delta", "d"], process)?;
                match self.k {
                    None | Some(5) => ProcessKind::Polygon { k: 5 },
                    Some(k) => {
                        return Err(CliError::Config(format!(
                            "k = {k} contradicts process pentagon (k = 5)"
                        )))
                    }
                }
            }
            other => {
                return Err(CliError::Config(format!(
                "unknown process `{other}`; expected interval, cube, simplex, polygon or pentagon"
            )))
            }
        };
        let cfg = RunConfig {
            process: kind,
            n,
            replicas: self.replicas.unwrap_or(1),
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// The given seed, else the value of [`SEED_VAR`], else [`DEFAULT_SEED`].
pub fn resolve_seed(seed: Option<u64>, env_seed: Option<&str>) -> Result<u64> {
    match (seed, env_seed) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v.trim().parse().map_err(|_| {
            CliError::Config(format!("{SEED_VAR} = {v:?} is not an unsigned integer"))
        }),
        (None, None) => Ok(DEFAULT_SEED),
    }
}

fn missing(key: &str) -> CliError {
    CliError::Config(format!("missing required key `{key}`"))
}

/// Reads the optional config file, overlays the flags and resolves.
pub fn parse_config(
    path: Option<&Path>,
    flags: &RawConfig,
    env_seed: Option<&str>,
) -> Result<RunConfig> {
    let base = match path {
        Some(p) => RawConfig::from_file(p)?,
        None => RawConfig::default(),
    };
    base.overlay(flags).resolve(env_seed)
}

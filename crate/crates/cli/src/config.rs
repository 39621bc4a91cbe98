//! Run settings assembled from defaults, an optional TOML file and flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dtpo_core::{EnvKind, TrainConfig};

/// Everything a `train` or `sweep` invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub env: Option<EnvKind>,
    pub seeds: Vec<u64>,
    /// Leaf budgets; `train` uses `train.leaves` and ignores this.
    pub budgets: Vec<usize>,
    pub rollouts: usize,
    pub out: PathBuf,
    pub train: TrainConfig,
}

pub const DEFAULT_ROLLOUTS: usize = 1000;
pub const DEFAULT_BUDGETS: [usize; 5] = [2, 4, 8, 16, 32];

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            env: None,
            seeds: vec![0],
            budgets: DEFAULT_BUDGETS.to_vec(),
            rollouts: DEFAULT_ROLLOUTS,
            out: PathBuf::from("."),
            train: TrainConfig::default(),
        }
    }
}

fn as_u64(key: &str, v: &toml::Value) -> Result<u64> {
    v.as_integer()
        .and_then(|i| u64::try_from(i).ok())
        .with_context(|| format!("config key `{key}` must be a non-negative integer"))
}

fn as_list(key: &str, v: &toml::Value) -> Result<Vec<u64>> {
    match v {
        toml::Value::Array(items) => items.iter().map(|i| as_u64(key, i)).collect(),
        other => Ok(vec![as_u64(key, other)?]),
    }
}

impl RunSettings {
    /// Applies a flat TOML table. Keys naming training hyperparameters use
    /// the same names as [`TrainConfig`]; `env`, `seed`/`seeds`, `leaves`
    /// (an integer or a list of budgets), `rollouts` and `out` are handled
    /// here.
    pub fn apply_toml(&mut self, text: &str) -> Result<()> {
        let mut table: toml::Table = text.parse().context("config file is not valid TOML")?;
        if let Some(v) = table.remove("env") {
            let name = v.as_str().context("config key `env` must be a string")?;
            self.env = Some(name.parse()?);
        }
        if let Some(v) = table.remove("seed") {
            self.seeds = vec![as_u64("seed", &v)?];
        }
        if let Some(v) = table.remove("seeds") {
            self.seeds = as_list("seeds", &v)?;
        }
        if let Some(v) = table.remove("rollouts") {
            self.rollouts = as_u64("rollouts", &v)? as usize;
        }
        if let Some(v) = table.remove("out") {
            self.out = PathBuf::from(v.as_str().context("config key `out` must be a string")?);
        }
        if let Some(v) = table.remove("leaves") {
            let budgets: Vec<usize> = as_list("leaves", &v)?.into_iter().map(|b| b as usize).collect();
            if let [single] = budgets[..] {
                self.train.leaves = single;
            }
            self.budgets = budgets;
        }
        // Remaining keys overlay the current training configuration.
        let mut merged = toml::Table::try_from(&self.train).context("serializing training config")?;
        for (k, v) in table {
            let v = match (merged.get(&k), v) {
                (None, _) => bail!("unknown config key `{k}`"),
                // Allow `eta = 1` for float-valued keys.
                (Some(toml::Value::Float(_)), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
                (_, v) => v,
            };
            merged.insert(k, v);
        }
        self.train = merged
            .try_into()
            .context("invalid value in config file")?;
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        self.apply_toml(&text)
            .with_context(|| format!("in config file {}", path.display()))
    }

    pub fn env(&self) -> Result<EnvKind> {
        self.env
            .context("no environment given; pass --env or set `env` in the config file")
    }
}

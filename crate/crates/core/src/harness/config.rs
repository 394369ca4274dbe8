//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! strategy = countbased
//! wrap_grimgep = true
//! alpha = -1
//! candidate_ks = 1, 3, 5
//! ```
//!
//! Keys mirror the serialized field names (`T`, `l` and `d` also accept
//! `temperature`, `history_length` and `latent_dim`). Environment constants
//! sit at the top level next to the other fields.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::grimgep::{ClusterSampling, EmOptions};
use crate::learner::{DEFAULT_CAPACITY, DEFAULT_EPISODE_LENGTH};
use crate::novelty::Strategy;
use crate::representation::{DEFAULT_BANDWIDTH, DEFAULT_SUPPORT_CAP};

/// How a bounded reacher memory is chosen from the buffer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MemoryMode {
    /// The most recently stored states.
    Recent,
    /// A fresh uniform subsample every epoch.
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub strategy: Strategy,
    pub wrap_grimgep: bool,
    pub cluster_sampling: ClusterSampling,
    /// Skewing exponent in `[-1, 0]`.
    pub alpha: f64,
    /// Bandit temperature.
    #[serde(rename = "T")]
    pub temperature: f64,
    /// Epochs-with-data kept per cluster history.
    #[serde(rename = "l")]
    pub history_length: usize,
    #[serde(rename = "d")]
    pub latent_dim: usize,
    pub candidate_ks: Vec<usize>,
    pub n_epochs: usize,
    pub goals_per_epoch: usize,
    pub n_warmup: usize,
    /// Goals are drawn uniformly up to and including this epoch.
    pub start_exploration: usize,
    pub episode_length: usize,
    pub seed: u64,
    pub capacity: usize,
    /// Models are refit after every `refit_every`-th epoch.
    pub refit_every: usize,
    pub pca_samples: usize,
    pub cluster_samples: usize,
    pub bandwidth: f64,
    pub density_support: usize,
    pub em_reg: f64,
    pub em_max_iter: usize,
    pub em_tol: f64,
    /// Number of buffer states the reacher may replay from; 0 lets it use
    /// the whole buffer.
    pub policy_memory: usize,
    /// Which states make up a bounded reacher memory.
    pub memory_mode: MemoryMode,
    #[serde(flatten)]
    pub env: EnvConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let em = EmOptions::default();
        Self {
            strategy: Strategy::CountBased,
            wrap_grimgep: false,
            cluster_sampling: ClusterSampling::Alp,
            alpha: -1.0,
            temperature: 5.0,
            history_length: 50,
            latent_dim: 8,
            candidate_ks: (1..=19).step_by(2).collect(),
            n_epochs: 1000,
            goals_per_epoch: 10,
            n_warmup: 50,
            start_exploration: 100,
            episode_length: DEFAULT_EPISODE_LENGTH,
            seed: 0,
            capacity: DEFAULT_CAPACITY,
            refit_every: 1,
            pca_samples: 2048,
            cluster_samples: 2048,
            bandwidth: DEFAULT_BANDWIDTH,
            density_support: DEFAULT_SUPPORT_CAP,
            em_reg: em.reg,
            em_max_iter: em.max_iter,
            em_tol: em.tol,
            policy_memory: 0,
            memory_mode: MemoryMode::Recent,
            env: EnvConfig::default(),
        }
    }
}

fn canonical_key(key: &str) -> &str {
    match key {
        "temperature" => "T",
        "history_length" => "l",
        "latent_dim" => "d",
        other => other,
    }
}

fn parse_like(template: &Value, raw: &str, key: &str) -> Result<Value> {
    let bad = || Error::Config(format!("cannot parse `{raw}` for `{key}`"));
    Ok(match template {
        Value::Bool(_) => Value::Bool(raw.parse().map_err(|_| bad())?),
        Value::Number(n) if n.is_f64() => {
            let v: f64 = raw.parse().map_err(|_| bad())?;
            Value::Number(Number::from_f64(v).ok_or_else(bad)?)
        }
        Value::Number(n) if n.is_u64() => Value::Number(raw.parse::<u64>().map_err(|_| bad())?.into()),
        Value::Number(_) => Value::Number(raw.parse::<i64>().map_err(|_| bad())?.into()),
        Value::String(_) => Value::String(raw.to_string()),
        Value::Array(items) => {
            let elem = items.first().cloned().unwrap_or(Value::Number(0u64.into()));
            Value::Array(
                raw.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_like(&elem, s, key))
                    .collect::<Result<_>>()?,
            )
        }
        _ => return Err(bad()),
    })
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar_text).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        cfg.apply(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    /// Sets fields from textual `key = value` pairs without validating.
    pub fn apply<'a, I>(&mut self, pairs: I) -> Result<()>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut json = serde_json::to_value(&*self)?;
        let obj = json.as_object_mut().expect("config serializes to an object");
        for (key, raw) in pairs {
            let key = canonical_key(key);
            let slot = obj.get(key).ok_or_else(|| Error::Config(format!("unknown key `{key}`")))?;
            let value = parse_like(slot, raw, key)?;
            obj.insert(key.to_string(), value);
        }
        *self = serde_json::from_value(json).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Applies one `key=value` override and re-validates.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
        self.apply([(k.trim(), v.trim())])?;
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("l", self.history_length),
            ("d", self.latent_dim),
            ("n_epochs", self.n_epochs),
            ("goals_per_epoch", self.goals_per_epoch),
            ("n_warmup", self.n_warmup),
            ("episode_length", self.episode_length),
            ("capacity", self.capacity),
            ("refit_every", self.refit_every),
            ("pca_samples", self.pca_samples),
            ("cluster_samples", self.cluster_samples),
            ("density_support", self.density_support),
            ("em_max_iter", self.em_max_iter),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("`{name}` must be positive")));
            }
        }
        if !(-1.0..=0.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha must lie in [-1, 0], got {}", self.alpha)));
        }
        for (name, v) in [("T", self.temperature), ("bandwidth", self.bandwidth), ("em_reg", self.em_reg)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("`{name}` must be positive and finite")));
            }
        }
        if !(self.em_tol.is_finite() && self.em_tol >= 0.0) {
            return Err(Error::Config("`em_tol` must be nonnegative".into()));
        }
        if self.start_exploration > self.n_epochs {
            return Err(Error::Config("start_exploration must not exceed n_epochs".into()));
        }
        if self.candidate_ks.is_empty() || self.candidate_ks.contains(&0) {
            return Err(Error::Config("candidate_ks must be a nonempty list of positive sizes".into()));
        }
        if self.candidate_ks.iter().any(|&k| k > self.cluster_samples) {
            return Err(Error::Config("every candidate k must fit in cluster_samples".into()));
        }
        if self.pca_samples < self.latent_dim {
            return Err(Error::Config("pca_samples must be at least d".into()));
        }
        let e = &self.env;
        if e.image_size < 6 || !e.image_size.is_multiple_of(2) {
            return Err(Error::Config("image_size must be even and at least 6".into()));
        }
        if self.latent_dim > (e.image_size / 2).pow(2) * 3 {
            return Err(Error::Config("d exceeds the pooled input dimension".into()));
        }
        if !(0.0..=1.0).contains(&e.tv_resample_prob) {
            return Err(Error::Config("tv_resample_prob must lie in [0, 1]".into()));
        }
        for (name, v) in [
            ("max_step", e.max_step),
            ("grab_radius", e.grab_radius),
            ("tv_radius", e.tv_radius),
            ("door_width", e.door_width),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("`{name}` must be positive")));
            }
        }
        if e.n_background_variants == 0 {
            return Err(Error::Config("`n_background_variants` must be positive".into()));
        }
        Ok(())
    }

    pub fn em_options(&self) -> EmOptions {
        EmOptions { max_iter: self.em_max_iter, tol: self.em_tol, reg: self.em_reg }
    }

    /// Short label such as `grim-lp-countbased`.
    pub fn label(&self) -> String {
        if !self.wrap_grimgep {
            return self.strategy.to_string();
        }
        let mode = match self.cluster_sampling {
            ClusterSampling::Alp => "lp",
            ClusterSampling::UniformAblation => "uni",
        };
        format!("grim-{mode}-{}", self.strategy)
    }

    /// Stable hash of every field except the seed.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.seed = 0;
        let text = serde_json::to_string(&c).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Renders the config back into the flat text format.
    pub fn to_text(&self) -> String {
        let json = serde_json::to_value(self).expect("config serializes");
        let obj: &Map<String, Value> = json.as_object().expect("object");
        obj.iter().map(|(k, v)| format!("{k} = {}\n", scalar_text(v))).collect()
    }
}

//! Novelty-based goal prioritization over the replay buffer.
//!
//! Two skewed samplers are provided next to plain uniform sampling:
//! count-based weights over coarse 3×3×4-level image keys, and density
//! skewing where each stored state is weighted by its density raised to a
//! negative power `alpha`.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;

pub const KEY_GRID: usize = 3;
pub const QUANT_LEVELS: usize = 4;
/// Keeps `v = 1.0` in the top bin.
pub const QUANT_EPS: f64 = 1e-9;

/// A 3×3 per-channel average-pooled image quantized to 4 levels,
/// stored as `(row, col, channel)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantKey(pub [u8; KEY_GRID * KEY_GRID * 3]);

impl QuantKey {
    pub fn get(&self, row: usize, col: usize, channel: usize) -> u8 {
        self.0[(row * KEY_GRID + col) * 3 + channel]
    }
}

pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0 - QUANT_EPS) * QUANT_LEVELS as f64).floor() as u8
}

pub fn count_key(image: &Image) -> QuantKey {
    let (h, w) = (image.height(), image.width());
    let mut sums = [0.0f64; KEY_GRID * KEY_GRID * 3];
    let mut areas = [0usize; KEY_GRID * KEY_GRID];
    for r in 0..h {
        let cr = (r * KEY_GRID / h.max(1)).min(KEY_GRID - 1);
        for c in 0..w {
            let cc = (c * KEY_GRID / w.max(1)).min(KEY_GRID - 1);
            let cell = cr * KEY_GRID + cc;
            areas[cell] += 1;
            for ch in 0..3 {
                sums[cell * 3 + ch] += image.get(r, c, ch) as f64;
            }
        }
    }
    let mut key = [0u8; KEY_GRID * KEY_GRID * 3];
    for (i, k) in key.iter_mut().enumerate() {
        let area = areas[i / 3].max(1) as f64;
        *k = quantize(sums[i] / area);
    }
    QuantKey(key)
}

/// Occurrence counts of quantized keys.
#[derive(Clone, Debug, Default)]
pub struct CountTable {
    counts: HashMap<QuantKey, u64>,
    total: u64,
}

impl CountTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one occurrence and returns the post-insertion count.
    pub fn record(&mut self, key: QuantKey) -> u64 {
        self.total += 1;
        let c = self.counts.entry(key).or_insert(0);
        *c += 1;
        *c
    }

    /// Removes one occurrence (buffer eviction).
    pub fn forget(&mut self, key: &QuantKey) {
        if let Some(c) = self.counts.get_mut(key) {
            *c -= 1;
            self.total -= 1;
            if *c == 0 {
                self.counts.remove(key);
            }
        }
    }

    pub fn count(&self, key: &QuantKey) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn n_keys(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

/// `count^alpha`; asking for the weight of an unseen key is an error.
pub fn count_weight(count: u64, alpha: f64) -> Result<f64> {
    if count == 0 {
        return Err(Error::InvalidArgument("count weight requested for an unseen key".into()));
    }
    Ok((count as f64).powf(alpha))
}

/// `p^alpha` for a strictly positive probability or density.
pub fn skew_weight(p: f64, alpha: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("skew weight needs p > 0, got {p}")));
    }
    Ok(p.powf(alpha))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Uniform,
    CountBased,
    Skewfit,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Strategy::Uniform),
            "countbased" => Ok(Strategy::CountBased),
            "skewfit" => Ok(Strategy::Skewfit),
            other => Err(Error::Config(format!("unknown strategy `{other}`"))),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Uniform => "uniform",
            Strategy::CountBased => "countbased",
            Strategy::Skewfit => "skewfit",
        })
    }
}

/// Per-index statistics the samplers need from a goal store.
pub trait GoalSource {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Count of the state's quantized key, `None` if no count table exists.
    fn count_at(&self, index: usize) -> Option<u64>;

    /// Log density of the state's latent, `None` if no density model is fitted.
    fn log_density_at(&self, index: usize) -> Option<f64>;
}

/// An explicit probability vector over buffer indices.
#[derive(Clone, Debug, PartialEq)]
pub struct GoalDistribution {
    probs: Vec<f64>,
}

impl GoalDistribution {
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("goal buffer"));
        }
        Ok(Self { probs: vec![1.0 / n as f64; n] })
    }

    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidArgument(format!("index {index} out of {n}")));
        }
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Ok(Self { probs })
    }

    /// Normalizes nonnegative finite weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("goal buffer"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("weights sum to zero".into()));
        }
        let mut probs = weights;
        probs.iter_mut().for_each(|w| *w /= total);
        Ok(Self { probs })
    }

    /// Normalizes `exp(log_weights)` without overflow.
    pub fn from_log_weights(log_weights: &[f64]) -> Result<Self> {
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::InvalidArgument("log weights have no finite maximum".into()));
        }
        Self::from_weights(log_weights.iter().map(|l| (l - max).exp()).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(i, _)| i)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(self, rng)
    }
}

/// Builds the strategy's normalized goal distribution over every stored state.
pub fn goal_distribution<S: GoalSource + ?Sized>(
    source: &S,
    strategy: Strategy,
    alpha: f64,
) -> Result<GoalDistribution> {
    let n = source.len();
    if n == 0 {
        return Err(Error::Empty("goal buffer"));
    }
    match strategy {
        Strategy::Uniform => GoalDistribution::uniform(n),
        Strategy::CountBased => {
            let weights = (0..n)
                .map(|i| {
                    let c = source.count_at(i).ok_or(Error::MissingModel("count table"))?;
                    count_weight(c, alpha)
                })
                .collect::<Result<Vec<_>>>()?;
            GoalDistribution::from_weights(weights)
        }
        Strategy::Skewfit => {
            let logs = (0..n)
                .map(|i| {
                    source
                        .log_density_at(i)
                        .map(|l| alpha * l)
                        .ok_or(Error::MissingModel("density model"))
                })
                .collect::<Result<Vec<_>>>()?;
            GoalDistribution::from_log_weights(&logs)
        }
    }
}

/// Inverse-CDF draw; indices with zero probability are never returned.
pub fn sample_index<R: Rng + ?Sized>(dist: &GoalDistribution, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (i, &p) in dist.probs.iter().enumerate() {
        if p > 0.0 {
            cum += p;
            last_positive = i;
            if u < cum {
                return i;
            }
        }
    }
    last_positive
}

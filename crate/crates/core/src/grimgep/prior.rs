//! Bandit cluster selection, masking priors and their combination with the
//! underlying sampler's distribution.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::novelty::GoalDistribution;

/// Share of cluster probability mass spread uniformly.
pub const UNIFORM_SHARE: f64 = 0.2;
/// Below this every ALP is treated as zero.
pub const ALP_EPS: f64 = 1e-12;

/// How the cluster for the next goal is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterSampling {
    /// Learning-progress bandit.
    Alp,
    /// Every cluster equally likely, ignoring progress.
    UniformAblation,
}

impl std::str::FromStr for ClusterSampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alp" | "lp" => Ok(ClusterSampling::Alp),
            "uniform-ablation" | "uniform" => Ok(ClusterSampling::UniformAblation),
            other => Err(Error::Config(format!("unknown cluster sampling `{other}`"))),
        }
    }
}

impl std::fmt::Display for ClusterSampling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClusterSampling::Alp => "alp",
            ClusterSampling::UniformAblation => "uniform-ablation",
        })
    }
}

/// `p(c) = 0.8 · ALP_c^T / Σ ALP_i^T + 0.2 / C`, uniform when every ALP is ~0.
pub fn cluster_probabilities(alps: &[f64], temperature: f64) -> Vec<f64> {
    let c = alps.len();
    if c == 0 {
        return Vec::new();
    }
    let uniform = 1.0 / c as f64;
    let max = alps.iter().copied().fold(0.0, f64::max);
    if max < ALP_EPS {
        return vec![uniform; c];
    }
    // Dividing by the max first keeps ALP^T finite and makes the result
    // exactly invariant to rescaling.
    let powered: Vec<f64> = alps.iter().map(|a| (a.max(0.0) / max).powf(temperature)).collect();
    let total: f64 = powered.iter().sum();
    powered
        .iter()
        .map(|p| (1.0 - UNIFORM_SHARE) * p / total + UNIFORM_SHARE * uniform)
        .collect()
}

pub fn cluster_draw_probabilities(mode: ClusterSampling, alps: &[f64], temperature: f64) -> Vec<f64> {
    match mode {
        ClusterSampling::Alp => cluster_probabilities(alps, temperature),
        ClusterSampling::UniformAblation => vec![1.0 / alps.len().max(1) as f64; alps.len()],
    }
}

/// Draws a cluster from the learning-progress bandit. Consumes exactly one
/// uniform variate.
pub fn sample_cluster<R: Rng + ?Sized>(alps: &[f64], temperature: f64, rng: &mut R) -> usize {
    draw(&cluster_probabilities(alps, temperature), rng)
}

pub(crate) fn draw<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    for (i, p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return i;
        }
    }
    probs.len().saturating_sub(1)
}

/// Uniform over the buffer states assigned to `cluster`, zero elsewhere.
pub fn build_prior(cluster: usize, assignments: &[usize]) -> Result<GoalDistribution> {
    if assignments.is_empty() {
        return Err(Error::Empty("buffer assignments"));
    }
    let members = assignments.iter().filter(|&&a| a == cluster).count();
    if members == 0 {
        return Err(Error::EmptyCluster(cluster));
    }
    let p = 1.0 / members as f64;
    GoalDistribution::from_weights(
        assignments
            .iter()
            .map(|&a| if a == cluster { p } else { 0.0 })
            .collect(),
    )
}

/// `p(g) ∝ prior(g) · imgep(g)`.
pub fn combine(prior: &GoalDistribution, imgep: &GoalDistribution) -> Result<GoalDistribution> {
    if prior.len() != imgep.len() {
        return Err(Error::DimensionMismatch { expected: prior.len(), got: imgep.len() });
    }
    let product: Vec<f64> = prior.probs().iter().zip(imgep.probs()).map(|(a, b)| a * b).collect();
    if !(product.iter().sum::<f64>() > 0.0) {
        return Err(Error::DisjointSupport);
    }
    GoalDistribution::from_weights(product)
}

/// Samples `combine(build_prior(c, assignments), imgep)` for any cluster `c`
/// without materializing full-length vectors: member lists and their
/// cumulative novelty mass are built once.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskedSampler {
    members: Vec<Vec<usize>>,
    cumulative: Vec<Vec<f64>>,
}

impl MaskedSampler {
    pub fn new(assignments: &[usize], imgep: &GoalDistribution, n_clusters: usize) -> Result<Self> {
        if assignments.len() != imgep.len() {
            return Err(Error::DimensionMismatch { expected: imgep.len(), got: assignments.len() });
        }
        let mut members = vec![Vec::new(); n_clusters];
        let mut cumulative = vec![Vec::new(); n_clusters];
        for (i, (&c, &p)) in assignments.iter().zip(imgep.probs()).enumerate() {
            if c >= n_clusters {
                return Err(Error::InvalidArgument(format!("cluster {c} out of range for {n_clusters}")));
            }
            let prev = cumulative[c].last().copied().unwrap_or(0.0);
            members[c].push(i);
            cumulative[c].push(prev + p);
        }
        Ok(Self { members, cumulative })
    }

    pub fn n_clusters(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self, cluster: usize) -> &[usize] {
        &self.members[cluster]
    }

    /// Goal-distribution mass held by `cluster`.
    pub fn mass(&self, cluster: usize) -> Result<f64> {
        if self.members.get(cluster).is_none_or(|m| m.is_empty()) {
            return Err(Error::EmptyCluster(cluster));
        }
        let total = *self.cumulative[cluster].last().expect("nonempty");
        if total > 0.0 {
            Ok(total)
        } else {
            Err(Error::DisjointSupport)
        }
    }

    /// The dense distribution this sampler draws from for `cluster`.
    pub fn distribution(&self, cluster: usize, len: usize) -> Result<GoalDistribution> {
        let total = self.mass(cluster)?;
        let mut probs = vec![0.0; len];
        let mut prev = 0.0;
        for (&i, &c) in self.members[cluster].iter().zip(&self.cumulative[cluster]) {
            probs[i] = (c - prev) / total;
            prev = c;
        }
        GoalDistribution::from_weights(probs)
    }

    /// One draw restricted to `cluster`; consumes exactly one uniform variate.
    pub fn sample<R: Rng + ?Sized>(&self, cluster: usize, rng: &mut R) -> Result<usize> {
        let total = self.mass(cluster)?;
        let cum = &self.cumulative[cluster];
        let u = rng.gen::<f64>() * total;
        let pos = cum.partition_point(|&x| x <= u).min(cum.len() - 1);
        // Rounding can land on a trailing zero-mass member; step back to a positive one.
        let mut k = pos;
        while k > 0 && cum[k] == cum[k - 1] {
            k -= 1;
        }
        Ok(self.members[cluster][k])
    }
}

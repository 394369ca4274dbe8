//! Per-cluster competence histories and absolute learning progress.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::representation::{reward, PcaModel};

use super::ClusteringFn;

/// One attempted goal and the state the episode ended in.
#[derive(Clone, Debug, PartialEq)]
pub struct PerformanceRecord {
    pub goal_image: Image,
    pub last_state_image: Image,
    pub epoch: u64,
}

/// Per cluster, the mean performance of each epoch that had data, oldest
/// first, keeping only the most recent `l` such epochs.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ClusterHistory {
    per_cluster: Vec<Vec<(u64, f64)>>,
    length: usize,
}

impl ClusterHistory {
    /// Groups `(cluster, epoch, performance)` triples. Clusters `>= n_clusters`
    /// are rejected.
    pub fn from_scored<I>(scored: I, n_clusters: usize, length: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, u64, f64)>,
    {
        let mut grouped: BTreeMap<(usize, u64), (f64, usize)> = BTreeMap::new();
        for (cluster, epoch, perf) in scored {
            if cluster >= n_clusters {
                return Err(Error::InvalidArgument(format!(
                    "cluster {cluster} out of range for {n_clusters} clusters"
                )));
            }
            let e = grouped.entry((cluster, epoch)).or_insert((0.0, 0));
            e.0 += perf;
            e.1 += 1;
        }
        let mut per_cluster = vec![Vec::new(); n_clusters];
        for ((cluster, epoch), (sum, count)) in grouped {
            per_cluster[cluster].push((epoch, sum / count as f64));
        }
        for h in &mut per_cluster {
            if h.len() > length {
                h.drain(..h.len() - length);
            }
        }
        Ok(Self { per_cluster, length })
    }

    pub fn n_clusters(&self) -> usize {
        self.per_cluster.len()
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn entries(&self, cluster: usize) -> &[(u64, f64)] {
        &self.per_cluster[cluster]
    }

    pub fn values(&self, cluster: usize) -> Vec<f64> {
        self.per_cluster[cluster].iter().map(|(_, v)| *v).collect()
    }

    pub fn alps(&self) -> AlpEstimate {
        AlpEstimate(
            (0..self.n_clusters())
                .map(|c| estimate_alp(&self.values(c)))
                .collect(),
        )
    }
}

/// Nonnegative learning-progress value per cluster.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct AlpEstimate(pub Vec<f64>);

impl AlpEstimate {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `|mean(first half) − mean(second half)|`, the first half taking
/// `⌊n/2⌋` entries. Histories shorter than 2 have no progress.
pub fn estimate_alp(history: &[f64]) -> f64 {
    let n = history.len();
    if n < 2 {
        return 0.0;
    }
    let half = n / 2;
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    (mean(&history[..half]) - mean(&history[half..])).abs()
}

/// Re-scores every record under the current reward model, groups the records
/// by the cluster of their goal and builds the truncated per-cluster histories.
pub fn recompute_performances(
    history: &[PerformanceRecord],
    clustering: &ClusteringFn,
    reward_model: &PcaModel,
    length: usize,
) -> Result<ClusterHistory> {
    if history.is_empty() {
        return Err(Error::Empty("performance history"));
    }
    let scored = history
        .iter()
        .map(|rec| {
            let goal = reward_model.embed(&rec.goal_image)?;
            let last = reward_model.embed(&rec.last_state_image)?;
            let cluster = clustering.assign(&rec.goal_image)?;
            Ok((cluster, rec.epoch, reward(&goal, &last)?))
        })
        .collect::<Result<Vec<_>>>()?;
    ClusterHistory::from_scored(scored, clustering.n_clusters(), length)
}

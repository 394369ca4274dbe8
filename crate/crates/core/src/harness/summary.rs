//! Across-seed aggregation and pairwise comparisons between configurations.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::experiment::{EpochMetrics, GoalCategory, RunResult};
use super::stats::{mean, standard_error, std_dev, welch_t_test, WelchTest};

/// Scalar per-epoch metrics in output order.
pub const SCALAR_METRICS: [&str; 13] = [
    "mean_success",
    "mean_f1",
    "frac_start_room",
    "frac_object_room",
    "frac_tv_on",
    "frac_tv_off",
    "cum_start_room",
    "cum_object_room",
    "cum_tv_on",
    "cum_tv_off",
    "n_clusters",
    "max_alp",
    "mean_alp",
];

pub fn scalar_metrics(m: &EpochMetrics) -> [f64; 13] {
    let f = m.goal_fractions;
    let c = m.cumulative_fractions;
    [
        m.mean_success,
        m.mean_f1,
        f[0],
        f[1],
        f[2],
        f[3],
        c[0],
        c[1],
        c[2],
        c[3],
        m.n_clusters as f64,
        m.max_alp(),
        m.mean_alp(),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub std: f64,
    pub se: f64,
}

impl Moments {
    pub fn of(xs: &[f64]) -> Self {
        Self { mean: mean(xs), std: std_dev(xs), se: standard_error(xs) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub epoch: usize,
    /// One entry per [`SCALAR_METRICS`] name.
    pub metrics: Vec<Moments>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub label: String,
    pub fingerprint: String,
    pub seeds: Vec<u64>,
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn final_row(&self) -> Option<&SummaryRow> {
        self.rows.last()
    }

    pub fn metric_index(name: &str) -> Option<usize> {
        SCALAR_METRICS.iter().position(|m| *m == name)
    }
}

/// Per-epoch mean, standard deviation and standard error across seeds of
/// runs sharing one configuration.
pub fn aggregate_seeds(results: &[RunResult]) -> Result<Summary> {
    let first = results.first().ok_or(Error::Empty("run results"))?;
    if let Some(other) = results.iter().find(|r| r.fingerprint != first.fingerprint) {
        return Err(Error::InvalidArgument(format!(
            "mixed configurations: {} and {}",
            first.fingerprint, other.fingerprint
        )));
    }
    let n_epochs = first.epochs.len();
    if results.iter().any(|r| r.epochs.len() != n_epochs) {
        return Err(Error::InvalidArgument("runs have different epoch counts".into()));
    }
    let mut rows = Vec::with_capacity(n_epochs);
    for e in 0..n_epochs {
        let epoch = first.epochs[e].epoch;
        if results.iter().any(|r| r.epochs[e].epoch != epoch) {
            return Err(Error::InvalidArgument(format!("epoch {epoch} does not align across seeds")));
        }
        let per_seed: Vec<[f64; 13]> = results.iter().map(|r| scalar_metrics(&r.epochs[e])).collect();
        let metrics = (0..SCALAR_METRICS.len())
            .map(|k| Moments::of(&per_seed.iter().map(|v| v[k]).collect::<Vec<_>>()))
            .collect();
        rows.push(SummaryRow { epoch, metrics });
    }
    Ok(Summary {
        label: first.config.label(),
        fingerprint: first.fingerprint.clone(),
        seeds: results.iter().map(RunResult::seed).collect(),
        rows,
    })
}

/// Final-epoch values of one metric across a group's seeds.
pub fn final_values(results: &[RunResult], metric: &str) -> Result<Vec<f64>> {
    let k = Summary::metric_index(metric).ok_or_else(|| Error::InvalidArgument(format!("unknown metric `{metric}`")))?;
    results
        .iter()
        .map(|r| {
            r.final_epoch()
                .map(|m| scalar_metrics(m)[k])
                .ok_or(Error::Empty("run epochs"))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub metric: String,
    pub a: String,
    pub b: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub test: WelchTest,
}

/// Metrics compared between every pair of configurations.
pub const COMPARED_METRICS: [&str; 3] = ["mean_success", "cum_tv_on", "cum_object_room"];

/// Groups runs by fingerprint, keyed by label (suffixed with the fingerprint
/// when two configurations share a label).
pub fn group_runs(results: Vec<RunResult>) -> Vec<(String, Vec<RunResult>)> {
    let mut by_fp: BTreeMap<String, Vec<RunResult>> = BTreeMap::new();
    for r in results {
        by_fp.entry(r.fingerprint.clone()).or_default().push(r);
    }
    let mut label_uses: BTreeMap<String, usize> = BTreeMap::new();
    for runs in by_fp.values() {
        *label_uses.entry(runs[0].config.label()).or_default() += 1;
    }
    let mut groups: Vec<(String, Vec<RunResult>)> = by_fp
        .into_values()
        .map(|mut runs| {
            runs.sort_by_key(RunResult::seed);
            let label = runs[0].config.label();
            let name = if label_uses[&label] > 1 { format!("{label}@{}", runs[0].fingerprint) } else { label };
            (name, runs)
        })
        .collect();
    groups.sort_by(|a, b| a.0.cmp(&b.0));
    groups
}

/// Welch tests on final-epoch values between every pair of groups.
pub fn compare_groups(groups: &[(String, Vec<RunResult>)]) -> Result<Vec<Comparison>> {
    let mut out = Vec::new();
    for (i, (na, ra)) in groups.iter().enumerate() {
        for (nb, rb) in &groups[i + 1..] {
            for metric in COMPARED_METRICS {
                let (a, b) = (final_values(ra, metric)?, final_values(rb, metric)?);
                if a.len() < 2 || b.len() < 2 {
                    continue;
                }
                out.push(Comparison {
                    metric: metric.to_string(),
                    a: na.clone(),
                    b: nb.clone(),
                    mean_a: mean(&a),
                    mean_b: mean(&b),
                    test: welch_t_test(&a, &b)?,
                });
            }
        }
    }
    Ok(out)
}

pub fn category_metric(c: GoalCategory, cumulative: bool) -> String {
    format!("{}{}", if cumulative { "cum_" } else { "frac_" }, c.name())
}

//! CSV and JSON files written by runs and comparisons.
//!
//! `metrics.csv` has one row per epoch with the columns in [`METRICS_HEADER`];
//! floats use scientific notation with 9 significant digits and `alps` holds
//! the per-cluster values joined by `;`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::experiment::{EpochMetrics, RunResult};
use super::summary::{Comparison, Summary, SCALAR_METRICS};

pub const METRICS_HEADER: &str = "seed,epoch,mean_success,mean_f1,frac_start_room,frac_object_room,frac_tv_on,frac_tv_off,cum_start_room,cum_object_room,cum_tv_on,cum_tv_off,n_clusters,max_alp,mean_alp,alps";

pub fn fmt_float(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn metrics_csv(result: &RunResult) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for m in &result.epochs {
        let f = m.goal_fractions;
        let c = m.cumulative_fractions;
        let floats = [m.mean_success, m.mean_f1, f[0], f[1], f[2], f[3], c[0], c[1], c[2], c[3]];
        let _ = write!(out, "{},{}", result.seed(), m.epoch);
        for v in floats {
            let _ = write!(out, ",{}", fmt_float(v));
        }
        let alps: Vec<String> = m.alps.iter().map(|&a| fmt_float(a)).collect();
        let _ = writeln!(
            out,
            ",{},{},{},{}",
            m.n_clusters,
            fmt_float(m.max_alp()),
            fmt_float(m.mean_alp()),
            alps.join(";")
        );
    }
    out
}

fn parse_err(line: usize, what: &str) -> Error {
    Error::Config(format!("metrics.csv line {line}: bad {what}"))
}

/// Parses `metrics.csv` back into `(seed, metrics)` rows.
pub fn parse_metrics_csv(text: &str) -> Result<Vec<(u64, EpochMetrics)>> {
    let mut lines = text.lines();
    if lines.next() != Some(METRICS_HEADER) {
        return Err(Error::Config("metrics.csv has an unexpected header".into()));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let n = i + 2;
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 16 {
                return Err(parse_err(n, "column count"));
            }
            let float = |k: usize| cols[k].parse::<f64>().map_err(|_| parse_err(n, "float"));
            let alps = if cols[15].is_empty() {
                Vec::new()
            } else {
                cols[15]
                    .split(';')
                    .map(|s| s.parse::<f64>().map_err(|_| parse_err(n, "alp")))
                    .collect::<Result<_>>()?
            };
            Ok((
                cols[0].parse().map_err(|_| parse_err(n, "seed"))?,
                EpochMetrics {
                    epoch: cols[1].parse().map_err(|_| parse_err(n, "epoch"))?,
                    mean_success: float(2)?,
                    mean_f1: float(3)?,
                    goal_fractions: [float(4)?, float(5)?, float(6)?, float(7)?],
                    cumulative_fractions: [float(8)?, float(9)?, float(10)?, float(11)?],
                    n_clusters: cols[12].parse().map_err(|_| parse_err(n, "n_clusters"))?,
                    alps,
                },
            ))
        })
        .collect()
}

/// Writes `metrics.csv` and `config.json` into `dir`.
pub fn write_run(dir: impl AsRef<Path>, result: &RunResult) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    fs::write(dir.join("metrics.csv"), metrics_csv(result))?;
    fs::write(dir.join("config.json"), result.config.to_json()? + "\n")?;
    Ok(())
}

/// Reads a run directory written by [`write_run`]; wall-clock time is not stored.
pub fn load_run(dir: impl AsRef<Path>) -> Result<RunResult> {
    let dir = dir.as_ref();
    let config = ExperimentConfig::from_json(&fs::read_to_string(dir.join("config.json"))?)?;
    let rows = parse_metrics_csv(&fs::read_to_string(dir.join("metrics.csv"))?)?;
    if let Some((seed, _)) = rows.iter().find(|(s, _)| *s != config.seed) {
        return Err(Error::Config(format!(
            "{}: metrics seed {seed} differs from config seed {}",
            dir.display(),
            config.seed
        )));
    }
    Ok(RunResult {
        fingerprint: config.fingerprint(),
        performance_records: rows.len() * config.goals_per_epoch,
        epochs: rows.into_iter().map(|(_, m)| m).collect(),
        config,
        wall_seconds: 0.0,
    })
}

/// One row per (configuration, epoch) with mean, std and se of every metric.
pub fn summary_csv(summaries: &[Summary]) -> String {
    let mut out = String::from("config,fingerprint,n_seeds,epoch");
    for m in SCALAR_METRICS {
        let _ = write!(out, ",{m}_mean,{m}_std,{m}_se");
    }
    out.push('\n');
    for s in summaries {
        for row in &s.rows {
            let _ = write!(out, "{},{},{},{}", s.label, s.fingerprint, s.seeds.len(), row.epoch);
            for m in &row.metrics {
                let _ = write!(out, ",{},{},{}", fmt_float(m.mean), fmt_float(m.std), fmt_float(m.se));
            }
            out.push('\n');
        }
    }
    out
}

pub fn comparisons_csv(comparisons: &[Comparison]) -> String {
    let mut out = String::from("metric,a,b,mean_a,mean_b,t,df,p\n");
    for c in comparisons {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.metric,
            c.a,
            c.b,
            fmt_float(c.mean_a),
            fmt_float(c.mean_b),
            fmt_float(c.test.t),
            fmt_float(c.test.df),
            fmt_float(c.test.p)
        );
    }
    out
}

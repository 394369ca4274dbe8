//! Experiment orchestration: configuration, the epoch loop, aggregation
//! across seeds and result files.

pub mod config;
pub mod experiment;
pub mod output;
pub mod stats;
pub mod summary;

pub use config::{ExperimentConfig, MemoryMode};
pub use experiment::{
    categorize_goal, run_experiment, run_experiment_with, EpochMetrics, Experiment, GoalCategory, RunResult,
};
pub use output::{load_run, metrics_csv, parse_metrics_csv, write_run};
pub use stats::{mean, smooth, std_dev, standard_error, welch_t_test, WelchTest};
pub use summary::{aggregate_seeds, compare_groups, group_runs, Comparison, Moments, Summary};

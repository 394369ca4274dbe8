//! Runs a short multi-seed comparison of count-based sampling with and
//! without the learning-progress wrapper and tests the difference.

use grimgep::harness::{run_experiment, welch_t_test, ExperimentConfig, GoalCategory};
use grimgep::novelty::Strategy;

fn main() -> grimgep::Result<()> {
    let base = ExperimentConfig {
        strategy: Strategy::CountBased,
        n_epochs: 300,
        start_exploration: 50,
        refit_every: 25,
        ..ExperimentConfig::default()
    };
    let mut tv = [Vec::new(), Vec::new()];
    for seed in 0..3 {
        for (i, wrap) in [false, true].into_iter().enumerate() {
            let r = run_experiment(ExperimentConfig { seed, wrap_grimgep: wrap, ..base.clone() })?;
            let last = r.final_epoch().expect("at least one epoch");
            println!(
                "seed {seed} {:<16} tv_on {:.3} object_room {:.3} success {:.2} ({:.0}s)",
                if wrap { "GRIM-CountBased" } else { "CountBased" },
                last.cumulative(GoalCategory::TvOn),
                last.cumulative(GoalCategory::ObjectRoom),
                last.mean_success,
                r.wall_seconds
            );
            tv[i].push(last.cumulative(GoalCategory::TvOn));
        }
    }
    let test = welch_t_test(&tv[0], &tv[1])?;
    println!("tv_on, plain minus wrapped: t = {:.2}, p = {:.4}", test.t, test.p);
    Ok(())
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use grimgep::grimgep::ClusterSampling;
use grimgep::harness::output::{comparisons_csv, summary_csv};
use grimgep::harness::{aggregate_seeds, compare_groups, group_runs, load_run, run_experiment_with, write_run};
use grimgep::harness::{Comparison, ExperimentConfig, RunResult};

#[derive(Parser)]
#[command(name = "grimgep", version, about = "Goal exploration experiments on the three-room playground")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seed and write metrics.csv and config.json.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// `key=value`, may be repeated.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        quiet: bool,
    },
    /// Aggregate run directories and test every pair of configurations.
    Compare {
        #[arg(long, num_args = 1.., required = true)]
        runs: Vec<PathBuf>,
        /// Summary table path; pairwise tests go next to it as `<stem>_tests.csv`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the learning-progress and uniform cluster-sampling variants over several seeds.
    Ablate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seeds: u64,
        #[arg(long, default_value = "ablation")]
        out: PathBuf,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn load_config(path: Option<&Path>, overrides: &[String]) -> grimgep::Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    for o in overrides {
        cfg.set(o)?;
    }
    Ok(cfg)
}

fn run_one(cfg: ExperimentConfig, out: &Path, quiet: bool) -> grimgep::Result<RunResult> {
    let label = cfg.label();
    let seed = cfg.seed;
    let every = (cfg.n_epochs / 20).max(1);
    let result = run_experiment_with(cfg, |m| {
        if !quiet && m.epoch % every == 0 {
            eprintln!(
                "[{label} seed {seed}] epoch {:>5}  success {:.3}  tv_on {:.3}  clusters {}",
                m.epoch,
                m.mean_success,
                m.cumulative_fractions[2],
                m.n_clusters
            );
        }
    })?;
    write_run(out, &result)?;
    Ok(result)
}

fn print_comparisons(comparisons: &[Comparison]) {
    for c in comparisons {
        println!(
            "{:<16} {:>24} vs {:<24} {:.4} vs {:.4}  t={:+.3} p={:.4}",
            c.metric, c.a, c.b, c.mean_a, c.mean_b, c.test.t, c.test.p
        );
    }
}

fn write_tables(results: Vec<RunResult>, table: &Path) -> grimgep::Result<()> {
    let groups = group_runs(results);
    let summaries = groups
        .iter()
        .map(|(_, runs)| aggregate_seeds(runs))
        .collect::<grimgep::Result<Vec<_>>>()?;
    let comparisons = compare_groups(&groups)?;
    if let Some(parent) = table.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(table, summary_csv(&summaries))?;
    let stem = table.file_stem().and_then(|s| s.to_str()).unwrap_or("summary");
    std::fs::write(table.with_file_name(format!("{stem}_tests.csv")), comparisons_csv(&comparisons))?;
    for s in &summaries {
        if let Some(row) = s.final_row() {
            println!(
                "{:<28} seeds {:>3}  final success {:.4} ± {:.4}",
                s.label,
                s.seeds.len(),
                row.metrics[0].mean,
                row.metrics[0].se
            );
        }
    }
    print_comparisons(&comparisons);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, seed, out, overrides, quiet } => {
            load_config(config.as_deref(), &overrides).and_then(|mut cfg| {
                if let Some(s) = seed {
                    cfg.seed = s;
                }
                let r = run_one(cfg, &out, quiet)?;
                println!("wrote {} epochs to {} in {:.1}s", r.epochs.len(), out.display(), r.wall_seconds);
                Ok(())
            })
        }
        Command::Compare { runs, out } => runs
            .iter()
            .map(load_run)
            .collect::<grimgep::Result<Vec<_>>>()
            .and_then(|results| write_tables(results, &out)),
        Command::Ablate { config, seeds, out, overrides } => {
            load_config(config.as_deref(), &overrides).and_then(|base| {
                let mut results = Vec::new();
                for mode in [ClusterSampling::Alp, ClusterSampling::UniformAblation] {
                    for seed in 0..seeds {
                        let cfg = ExperimentConfig { wrap_grimgep: true, cluster_sampling: mode, seed, ..base.clone() };
                        let dir = out.join(cfg.label()).join(format!("seed_{seed}"));
                        results.push(run_one(cfg, &dir, false)?);
                    }
                }
                write_tables(results, &out.join("summary.csv"))
            })
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

//! The epoch loop: warmup, goal selection, goal pursuit, model refits and
//! evaluation on the fixed test set.

use std::time::Instant;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{evaluate_success, f1_visible, Env, EnvConfig, EnvState, GoalSpec, Room};
use crate::error::{Error, Result};
use crate::grimgep::{cluster_draw_probabilities, prior, select_gmm_by_aic_with, ClusterHistory, ClusteringFn, MaskedSampler};
use crate::learner::{random_rollout, reach, reach_from, Anchors, ReplayBuffer, TailPolicy, Trajectory};
use crate::novelty::{goal_distribution, GoalDistribution, Strategy};
use crate::representation::{fit_density, reward, squared_distance, PcaModel, POOL_FACTOR};
use crate::rng::{stream, Stream, StreamRng};

use super::config::{ExperimentConfig, MemoryMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalCategory {
    StartRoom,
    ObjectRoom,
    TvOn,
    TvOff,
}

impl GoalCategory {
    pub const ALL: [GoalCategory; 4] =
        [GoalCategory::StartRoom, GoalCategory::ObjectRoom, GoalCategory::TvOn, GoalCategory::TvOff];

    pub fn name(self) -> &'static str {
        match self {
            GoalCategory::StartRoom => "start_room",
            GoalCategory::ObjectRoom => "object_room",
            GoalCategory::TvOn => "tv_on",
            GoalCategory::TvOff => "tv_off",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// The goal's room, with the TV room split by whether the TV is on.
pub fn categorize_goal(goal: &EnvState) -> GoalCategory {
    match goal.room {
        Room::Start => GoalCategory::StartRoom,
        Room::Object => GoalCategory::ObjectRoom,
        Room::Tv if goal.tv_on => GoalCategory::TvOn,
        Room::Tv => GoalCategory::TvOff,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub mean_success: f64,
    pub mean_f1: f64,
    /// Category shares of this epoch's goals, indexed by [`GoalCategory::index`].
    pub goal_fractions: [f64; 4],
    /// Category shares over all goals drawn in exploration epochs so far
    /// (all zero before exploration starts).
    pub cumulative_fractions: [f64; 4],
    pub n_clusters: usize,
    pub alps: Vec<f64>,
}

impl EpochMetrics {
    pub fn fraction(&self, c: GoalCategory) -> f64 {
        self.goal_fractions[c.index()]
    }

    pub fn cumulative(&self, c: GoalCategory) -> f64 {
        self.cumulative_fractions[c.index()]
    }

    pub fn max_alp(&self) -> f64 {
        self.alps.iter().copied().fold(0.0, f64::max)
    }

    pub fn mean_alp(&self) -> f64 {
        if self.alps.is_empty() {
            0.0
        } else {
            self.alps.iter().sum::<f64>() / self.alps.len() as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub fingerprint: String,
    pub epochs: Vec<EpochMetrics>,
    pub performance_records: usize,
    pub wall_seconds: f64,
}

impl RunResult {
    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn final_epoch(&self) -> Option<&EpochMetrics> {
        self.epochs.last()
    }

    pub fn success_curve(&self) -> Vec<f64> {
        self.epochs.iter().map(|e| e.mean_success).collect()
    }

    /// Best success over all epochs minus final success.
    pub fn forgetting(&self) -> f64 {
        let best = self.epochs.iter().map(|e| e.mean_success).fold(f64::NEG_INFINITY, f64::max);
        match self.final_epoch() {
            Some(f) => best - f.mean_success,
            None => 0.0,
        }
    }
}

/// One attempted goal, kept as pooled pixels so it can be re-embedded after
/// every representation refit.
struct Attempt {
    goal: Vec<f32>,
    last: Vec<f32>,
    epoch: u64,
    cluster: usize,
    performance: f64,
}

struct Rngs {
    env: StreamRng,
    policy: StreamRng,
    goals: StreamRng,
    bandit: StreamRng,
    em: StreamRng,
    refit: StreamRng,
    memory: StreamRng,
    eval: StreamRng,
}

impl Rngs {
    fn new(seed: u64) -> Self {
        Self {
            env: stream(seed, Stream::Env),
            policy: stream(seed, Stream::Policy),
            goals: stream(seed, Stream::Goals),
            bandit: stream(seed, Stream::Bandit),
            em: stream(seed, Stream::EmInit),
            refit: stream(seed, Stream::Refit),
            memory: stream(seed, Stream::Memory),
            eval: stream(seed, Stream::Eval),
        }
    }
}

/// A single-seed run that can be advanced one epoch at a time.
pub struct Experiment {
    config: ExperimentConfig,
    env: Env,
    eval_env: Env,
    buffer: ReplayBuffer,
    test_set: Vec<GoalSpec>,
    test_pooled: Vec<Vec<f32>>,
    rngs: Rngs,
    attempts: Vec<Attempt>,
    alps: Vec<f64>,
    cumulative: [u64; 4],
    memory: Vec<usize>,
    /// Best whole-buffer anchor per test goal as `(global id, squared distance)`,
    /// extended incrementally until the next refit or eviction of an anchor.
    eval_anchors: Option<Vec<(u64, f64)>>,
    eval_latents: Vec<Vec<f64>>,
    eval_scanned: u64,
    next_rollout_seed: u64,
    epoch: usize,
}

impl Experiment {
    /// Validates the config, runs the warmup rollouts and fits the first models.
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let env = Env::new(config.env.clone());
        let eval_env = Env::new(EnvConfig { tv_enabled: false, ..config.env.clone() });
        let test_set = eval_env.build_test_set();
        let test_pooled = test_set
            .iter()
            .map(|g| g.image.downsample(POOL_FACTOR))
            .collect::<Result<Vec<_>>>()?;
        let mut exp = Self {
            buffer: ReplayBuffer::new(env.clone(), config.capacity),
            rngs: Rngs::new(config.seed),
            env,
            eval_env,
            test_set,
            test_pooled,
            attempts: Vec::new(),
            alps: Vec::new(),
            cumulative: [0; 4],
            memory: Vec::new(),
            eval_anchors: None,
            eval_latents: Vec::new(),
            eval_scanned: 0,
            next_rollout_seed: 0,
            epoch: 0,
            config,
        };
        for _ in 0..exp.config.n_warmup {
            let seed = exp.fresh_seed();
            let t = random_rollout(
                &exp.env,
                seed,
                exp.config.episode_length,
                &mut exp.rngs.env,
                &mut exp.rngs.policy,
            );
            exp.buffer.record_rollout(&t)?;
        }
        exp.refit()?;
        Ok(exp)
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    pub fn is_finished(&self) -> bool {
        self.epoch >= self.config.n_epochs
    }

    pub fn performance_records(&self) -> usize {
        self.attempts.len()
    }

    pub fn alps(&self) -> &[f64] {
        &self.alps
    }

    pub fn test_set(&self) -> &[GoalSpec] {
        &self.test_set
    }

    fn fresh_seed(&mut self) -> u64 {
        let s = self.next_rollout_seed;
        self.next_rollout_seed += 1;
        s
    }

    fn exploring(&self) -> bool {
        self.epoch > self.config.start_exploration
    }

    /// Whether the clustering is needed, now or by the next epoch's draw.
    fn grim_active(&self) -> bool {
        self.config.wrap_grimgep
            && self.epoch >= self.config.start_exploration
            && self.epoch < self.config.n_epochs
    }

    fn refresh_memory(&mut self) {
        let k = self.config.policy_memory;
        let n = self.buffer.len();
        self.memory = if k == 0 || k >= n {
            Vec::new()
        } else {
            match self.config.memory_mode {
                MemoryMode::Recent => (n - k..n).collect(),
                MemoryMode::Uniform => {
                    let mut idx = index::sample(&mut self.rngs.memory, n, k).into_vec();
                    idx.sort_unstable();
                    idx
                }
            }
        };
    }

    fn sample_indices(rng: &mut StreamRng, n: usize, k: usize) -> Vec<usize> {
        let mut idx = if k >= n { (0..n).collect() } else { index::sample(rng, n, k).into_vec() };
        idx.sort_unstable();
        idx
    }

    /// Refits the reward PCA and, when in use, the density and the clustering,
    /// then re-scores the whole performance history.
    fn refit(&mut self) -> Result<()> {
        let cfg = &self.config;
        let n = self.buffer.len();
        let uses_density = cfg.strategy == Strategy::Skewfit;

        // The density is fit on goals drawn from the current skewed weighting.
        let density_idx: Option<Vec<usize>> = if uses_density {
            Some(match goal_distribution(&self.buffer, Strategy::Skewfit, cfg.alpha) {
                Ok(dist) => (0..cfg.density_support).map(|_| dist.sample(&mut self.rngs.refit)).collect(),
                Err(Error::MissingModel(_)) => Self::sample_indices(&mut self.rngs.refit, n, cfg.density_support),
                Err(e) => return Err(e),
            })
        } else {
            None
        };

        let pca_idx = Self::sample_indices(&mut self.rngs.refit, n, cfg.pca_samples);
        let rows: Vec<&[f32]> = pca_idx.iter().map(|&i| self.buffer.pooled(i)).collect();
        let size = cfg.env.image_size;
        let pca = PcaModel::fit_pooled(&rows, cfg.latent_dim, (size, size))?;
        self.buffer.set_reward_model(pca.clone())?;

        if let Some(idx) = density_idx {
            let latents: Vec<Vec<f64>> =
                idx.iter().map(|&i| self.buffer.latent(i).expect("latents cached").to_vec()).collect();
            let density = fit_density(&latents, cfg.bandwidth, cfg.density_support, &mut self.rngs.refit)?;
            self.buffer.set_density(density)?;
        }

        if self.grim_active() {
            let idx = Self::sample_indices(&mut self.rngs.refit, n, cfg.cluster_samples);
            let latents: Vec<Vec<f64>> =
                idx.iter().map(|&i| self.buffer.latent(i).expect("latents cached").to_vec()).collect();
            let ks: Vec<usize> = cfg.candidate_ks.iter().copied().filter(|&k| k <= latents.len()).collect();
            let gmm = select_gmm_by_aic_with(&latents, &ks, &cfg.em_options(), &mut self.rngs.em)?;
            self.buffer.set_clustering(ClusteringFn::new(pca, gmm)?)?;
        }
        self.eval_anchors = None;
        self.rescore(0);
        Ok(())
    }

    /// Scores attempts from `start` on with the current reward model and clustering.
    fn rescore(&mut self, start: usize) {
        let Some(model) = self.buffer.reward_model() else { return };
        let clustering = self.buffer.clustering();
        let d = model.latent_dim();
        let (mut g, mut l) = (vec![0.0; d], vec![0.0; d]);
        let mut scratch = vec![0.0; clustering.map_or(0, |c| c.n_clusters())];
        for a in &mut self.attempts[start..] {
            model.embed_pooled_into(&a.goal, &mut g);
            model.embed_pooled_into(&a.last, &mut l);
            a.performance = reward(&g, &l).expect("equal latent sizes");
            a.cluster = clustering.map_or(0, |c| c.gmm().assign_with(&g, &mut scratch));
        }
    }

    fn update_alps(&mut self) -> Result<()> {
        self.alps = match self.buffer.clustering() {
            Some(cl) if self.config.wrap_grimgep && !self.attempts.is_empty() => ClusterHistory::from_scored(
                self.attempts.iter().map(|a| (a.cluster, a.epoch, a.performance)),
                cl.n_clusters(),
                self.config.history_length,
            )?
            .alps()
            .0,
            _ => Vec::new(),
        };
        Ok(())
    }

    fn draw_goals(&mut self) -> Result<Vec<usize>> {
        let n = self.buffer.len();
        let k = self.config.goals_per_epoch;
        if !self.exploring() {
            let uniform = GoalDistribution::uniform(n)?;
            return Ok((0..k).map(|_| uniform.sample(&mut self.rngs.goals)).collect());
        }
        let imgep = goal_distribution(&self.buffer, self.config.strategy, self.config.alpha)?;
        let assignments = match self.buffer.cluster_assignments() {
            Some(a) if self.config.wrap_grimgep => a,
            _ => return Ok((0..k).map(|_| imgep.sample(&mut self.rngs.goals)).collect()),
        };
        let n_clusters = self.buffer.clustering().map_or(0, |c| c.n_clusters());
        let alps = if self.alps.len() == n_clusters { self.alps.clone() } else { vec![0.0; n_clusters] };
        let cluster_probs =
            cluster_draw_probabilities(self.config.cluster_sampling, &alps, self.config.temperature);
        // Equivalent to drawing from combine(build_prior(c), imgep) per goal.
        let sampler = MaskedSampler::new(assignments, &imgep, n_clusters)?;
        let mut goals = Vec::with_capacity(k);
        for _ in 0..k {
            // Empty clusters only appear transiently after a refit; redraw a few times.
            let mut chosen = None;
            for _ in 0..n_clusters.max(1) {
                let c = prior::draw(&cluster_probs, &mut self.rngs.bandit);
                if !sampler.members(c).is_empty() {
                    chosen = Some(c);
                    break;
                }
            }
            let goal = match chosen {
                Some(c) => match sampler.sample(c, &mut self.rngs.goals) {
                    Ok(g) => g,
                    Err(Error::DisjointSupport) => {
                        let m = sampler.members(c);
                        m[((self.rngs.goals.gen::<f64>() * m.len() as f64) as usize).min(m.len() - 1)]
                    }
                    Err(e) => return Err(e),
                },
                None => imgep.sample(&mut self.rngs.goals),
            };
            goals.push(goal);
        }
        Ok(goals)
    }

    /// Advances one epoch and returns its metrics.
    pub fn step_epoch(&mut self) -> Result<EpochMetrics> {
        if self.is_finished() {
            return Err(Error::InvalidArgument("experiment already finished".into()));
        }
        self.epoch += 1;
        self.refresh_memory();
        let goals = self.draw_goals()?;

        let mut counts = [0u64; 4];
        let mut rollouts: Vec<(u64, Trajectory)> = Vec::with_capacity(goals.len());
        let first_new = self.attempts.len();
        for &g in &goals {
            counts[categorize_goal(self.buffer.state(g)).index()] += 1;
            let latent = self.buffer.latent(g).ok_or(Error::MissingModel("reward model"))?.to_vec();
            let t = reach(
                &self.buffer,
                anchors(&self.memory, &self.buffer),
                &latent,
                &self.env,
                self.config.episode_length,
                TailPolicy::Random,
                &mut self.rngs.env,
                &mut self.rngs.policy,
            )?;
            let last = self.env.render(t.last_state()).downsample(POOL_FACTOR)?;
            self.attempts.push(Attempt {
                goal: self.buffer.pooled(g).to_vec(),
                last,
                epoch: self.epoch as u64,
                cluster: 0,
                performance: 0.0,
            });
            rollouts.push((self.buffer.first_id() + g as u64, t));
        }
        if self.exploring() {
            for (c, n) in self.cumulative.iter_mut().zip(counts) {
                *c += n;
            }
        }
        for (goal_id, mut t) in rollouts {
            t.goal_index = self.buffer.index_of(goal_id);
            self.buffer.record_rollout(&t)?;
        }

        let due = self.epoch.is_multiple_of(self.config.refit_every)
            || (self.grim_active() && self.buffer.clustering().is_none());
        if due {
            self.refit()?;
        } else {
            self.rescore(first_new);
        }
        self.update_alps()?;

        let (mean_success, mean_f1) = self.evaluate()?;
        let total: u64 = counts.iter().sum();
        let cum_total: u64 = self.cumulative.iter().sum();
        let frac = |c: &[u64; 4], t: u64| c.map(|v| if t == 0 { 0.0 } else { v as f64 / t as f64 });
        Ok(EpochMetrics {
            epoch: self.epoch,
            mean_success,
            mean_f1,
            goal_fractions: frac(&counts, total),
            cumulative_fractions: frac(&self.cumulative, cum_total),
            n_clusters: if self.config.wrap_grimgep { self.buffer.clustering().map_or(0, |c| c.n_clusters()) } else { 0 },
            alps: self.alps.clone(),
        })
    }

    /// Mean success and visible-entity F1 over the test set. The TV cannot be
    /// switched on and nothing is recorded.
    pub fn evaluate(&mut self) -> Result<(f64, f64)> {
        let anchors = self.eval_anchor_indices()?;
        let mut successes = 0usize;
        let mut f1 = 0.0;
        // The hold tail draws nothing; this only satisfies the signature.
        let mut unused = self.rngs.eval.clone();
        for (goal, &anchor) in self.test_set.iter().zip(&anchors) {
            let t = reach_from(
                &self.buffer,
                anchor,
                &self.eval_env,
                self.config.episode_length,
                TailPolicy::Hold,
                &mut self.rngs.eval,
                &mut unused,
            )?;
            successes += evaluate_success(goal, t.last_state()) as usize;
            f1 += f1_visible(&goal.state, t.last_state());
        }
        let n = self.test_set.len() as f64;
        Ok((successes as f64 / n, f1 / n))
    }

    /// Anchor the reacher would pick for each test goal.
    fn eval_anchor_indices(&mut self) -> Result<Vec<usize>> {
        let model = self.buffer.reward_model().ok_or(Error::MissingModel("reward model"))?;
        if !self.memory.is_empty() && self.memory.len() < self.buffer.len() {
            return self
                .test_pooled
                .iter()
                .map(|p| self.buffer.best_anchor(&model.embed_pooled(p)?, Anchors::Subset(&self.memory)))
                .collect();
        }
        let first = self.buffer.first_id();
        let end = first + self.buffer.len() as u64;
        let stale = match &self.eval_anchors {
            None => true,
            Some(best) => best.iter().any(|&(id, _)| id < first),
        };
        if stale {
            self.eval_latents =
                self.test_pooled.iter().map(|p| model.embed_pooled(p)).collect::<Result<_>>()?;
            self.eval_anchors = Some(vec![(u64::MAX, f64::INFINITY); self.test_set.len()]);
            self.eval_scanned = first;
        }
        let latents = self.buffer.latents().expect("reward model attached");
        let d = model.latent_dim();
        let best = self.eval_anchors.as_mut().expect("initialized above");
        for id in self.eval_scanned.max(first)..end {
            let i = (id - first) as usize;
            let z = &latents[i * d..(i + 1) * d];
            for (b, g) in best.iter_mut().zip(&self.eval_latents) {
                let dist = squared_distance(g, z);
                if dist < b.1 {
                    *b = (id, dist);
                }
            }
        }
        self.eval_scanned = end;
        Ok(best.iter().map(|&(id, _)| (id - first) as usize).collect())
    }

    /// Runs every remaining epoch, calling `on_epoch` after each.
    pub fn run<F: FnMut(&EpochMetrics)>(mut self, mut on_epoch: F) -> Result<RunResult> {
        let start = Instant::now();
        let mut epochs = Vec::with_capacity(self.config.n_epochs);
        while !self.is_finished() {
            let m = self.step_epoch()?;
            on_epoch(&m);
            epochs.push(m);
        }
        Ok(RunResult {
            fingerprint: self.config.fingerprint(),
            performance_records: self.attempts.len(),
            config: self.config,
            epochs,
            wall_seconds: start.elapsed().as_secs_f64(),
        })
    }
}

fn anchors<'a>(memory: &'a [usize], buffer: &ReplayBuffer) -> Anchors<'a> {
    if memory.is_empty() || memory.len() >= buffer.len() {
        Anchors::All
    } else {
        Anchors::Subset(memory)
    }
}

pub fn run_experiment(config: ExperimentConfig) -> Result<RunResult> {
    run_experiment_with(config, |_| {})
}

pub fn run_experiment_with<F: FnMut(&EpochMetrics)>(config: ExperimentConfig, on_epoch: F) -> Result<RunResult> {
    Experiment::new(config)?.run(on_epoch)
}

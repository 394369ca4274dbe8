//! Replay buffer and a trajectory-replay goal reacher.
//!
//! The reacher stands in for a learned goal-conditioned policy. Dynamics are
//! deterministic apart from the TV, so any stored state can be reached again
//! by resetting and replaying the actions that led to it. To pursue a goal,
//! the reacher picks the known state whose latent is closest to the goal's,
//! replays its action prefix and spends the rest of the episode on a tail
//! policy (uniform random actions while exploring, holding still when
//! evaluating).

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{Action, Env, EnvState};
use crate::error::{Error, Result};
use crate::grimgep::ClusteringFn;
use crate::image::Image;
use crate::novelty::{count_key, CountTable, GoalSource, QuantKey};
use crate::representation::{squared_distance, DensityModel, PcaModel, POOL_FACTOR};

pub const DEFAULT_CAPACITY: usize = 200_000;
pub const DEFAULT_EPISODE_LENGTH: usize = 50;

/// A rollout before it is stored: `states.len() == actions.len() + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub actions: Vec<Action>,
    pub states: Vec<EnvState>,
    /// Buffer index of the pursued goal (absent for warmup rollouts).
    pub goal_index: Option<usize>,
}

impl Trajectory {
    pub fn last_state(&self) -> &EnvState {
        self.states.last().expect("trajectory holds at least the reset state")
    }

    pub fn is_consistent(&self) -> bool {
        self.states.len() == self.actions.len() + 1
    }
}

/// What the reacher does after the replayed prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailPolicy {
    Random,
    Hold,
}

/// Which stored states the reacher may anchor on.
#[derive(Clone, Copy, Debug)]
pub enum Anchors<'a> {
    All,
    Subset(&'a [usize]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoredTrajectory {
    pub seed: u64,
    pub actions: Vec<Action>,
    /// Global id of the reset state; visited ids are `first_id..=first_id + actions.len()`.
    pub first_id: u64,
    pub goal_id: Option<u64>,
}

impl StoredTrajectory {
    pub fn visited(&self) -> std::ops::RangeInclusive<u64> {
        self.first_id..=self.first_id + self.actions.len() as u64
    }
}

/// Vec-backed FIFO with amortized O(1) front removal and contiguous slices.
#[derive(Clone, Debug)]
struct Fifo<T> {
    data: Vec<T>,
    head: usize,
}

impl<T> Default for Fifo<T> {
    fn default() -> Self {
        Self { data: Vec::new(), head: 0 }
    }
}

impl<T: Clone> Fifo<T> {
    fn as_slice(&self) -> &[T] {
        &self.data[self.head..]
    }

    fn extend_from_slice(&mut self, v: &[T]) {
        self.data.extend_from_slice(v);
    }

    fn push(&mut self, v: T) {
        self.data.push(v);
    }

    fn drop_front(&mut self, n: usize) {
        self.head += n;
        if self.head > self.data.len() / 2 {
            self.data.drain(..self.head);
            self.head = 0;
        }
    }

    fn clear(&mut self) {
        self.data.clear();
        self.head = 0;
    }
}

/// Distinct pooled observations with reference counts and per-observation
/// model caches. Many states share an observation, so models are evaluated
/// once per distinct row.
#[derive(Clone, Debug, Default)]
struct ObservationTable {
    /// `slots × pooled_dim`, row-major; freed rows are reused.
    rows: Vec<f32>,
    refs: Vec<u32>,
    free: Vec<u32>,
    /// Row hash to the slots holding rows with that hash.
    lookup: HashMap<u64, Vec<u32>>,
    latents: Vec<f64>,
    log_densities: Vec<f64>,
    clusters: Vec<usize>,
}

impl ObservationTable {
    fn row(&self, slot: u32, dim: usize) -> &[f32] {
        let s = slot as usize;
        &self.rows[s * dim..(s + 1) * dim]
    }

    fn hash(row: &[f32]) -> u64 {
        let mut h = DefaultHasher::new();
        for v in row {
            v.to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// Slot holding `row`, and whether it was created by this call.
    fn insert(&mut self, row: &[f32], dim: usize) -> (u32, bool) {
        let h = Self::hash(row);
        if let Some(slots) = self.lookup.get(&h) {
            if let Some(&s) = slots.iter().find(|&&s| self.row(s, dim) == row) {
                self.refs[s as usize] += 1;
                return (s, false);
            }
        }
        let slot = match self.free.pop() {
            Some(s) => {
                self.rows[s as usize * dim..(s as usize + 1) * dim].copy_from_slice(row);
                self.refs[s as usize] = 1;
                s
            }
            None => {
                self.rows.extend_from_slice(row);
                self.refs.push(1);
                (self.refs.len() - 1) as u32
            }
        };
        self.lookup.entry(h).or_default().push(slot);
        (slot, true)
    }

    fn release(&mut self, slot: u32, dim: usize) {
        let r = &mut self.refs[slot as usize];
        *r -= 1;
        if *r == 0 {
            let h = Self::hash(self.row(slot, dim));
            if let Some(slots) = self.lookup.get_mut(&h) {
                slots.retain(|&s| s != slot);
                if slots.is_empty() {
                    self.lookup.remove(&h);
                }
            }
            self.free.push(slot);
        }
    }

    fn live(&self) -> usize {
        self.refs.len() - self.free.len()
    }

    fn live_slots(&self) -> impl Iterator<Item = u32> + '_ {
        self.refs.iter().enumerate().filter(|(_, &r)| r > 0).map(|(s, _)| s as u32)
    }
}

/// Append-only store of every encountered state, with FIFO eviction beyond
/// `capacity` and per-state caches kept in sync with the attached models.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    env: Env,
    capacity: usize,
    pooled_dim: usize,
    /// Global id of the oldest retained state.
    first_id: u64,
    states: Fifo<EnvState>,
    /// `(trajectory id, step)` per state.
    origins: Fifo<(u64, u32)>,
    /// Per-state slot in `observations`.
    obs: Fifo<u32>,
    observations: ObservationTable,
    /// Per-state id into `key_table`.
    keys: Fifo<u32>,
    key_table: Vec<QuantKey>,
    key_ids: HashMap<QuantKey, u32>,
    /// Live count per key id, mirrors `counts`.
    key_counts: Vec<u64>,
    counts: CountTable,
    trajectories: VecDeque<(u64, StoredTrajectory)>,
    next_trajectory: u64,
    reward_model: Option<PcaModel>,
    latents: Fifo<f64>,
    density: Option<DensityModel>,
    log_densities: Fifo<f64>,
    clustering: Option<ClusteringFn>,
    clusters: Fifo<usize>,
}

impl ReplayBuffer {
    pub fn new(env: Env, capacity: usize) -> Self {
        let n = env.config().image_size / POOL_FACTOR;
        Self {
            env,
            capacity: capacity.max(1),
            pooled_dim: n * n * 3,
            first_id: 0,
            states: Fifo::default(),
            origins: Fifo::default(),
            obs: Fifo::default(),
            observations: ObservationTable::default(),
            keys: Fifo::default(),
            key_table: Vec::new(),
            key_ids: HashMap::new(),
            key_counts: Vec::new(),
            counts: CountTable::new(),
            trajectories: VecDeque::new(),
            next_trajectory: 0,
            reward_model: None,
            latents: Fifo::default(),
            density: None,
            log_densities: Fifo::default(),
            clustering: None,
            clusters: Fifo::default(),
        }
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.states.as_slice().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Global id of the state currently at index 0.
    pub fn first_id(&self) -> u64 {
        self.first_id
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        id.checked_sub(self.first_id).map(|i| i as usize).filter(|&i| i < self.len())
    }

    pub fn state(&self, i: usize) -> &EnvState {
        &self.states.as_slice()[i]
    }

    pub fn states(&self) -> &[EnvState] {
        self.states.as_slice()
    }

    /// Observations are a pure function of the state, so they are re-rendered on demand.
    pub fn image(&self, i: usize) -> Image {
        self.env.render(self.state(i))
    }

    pub fn pooled(&self, i: usize) -> &[f32] {
        self.observations.row(self.obs.as_slice()[i], self.pooled_dim)
    }

    /// Number of distinct pooled observations among the stored states.
    pub fn n_distinct_observations(&self) -> usize {
        self.observations.live()
    }

    pub fn key(&self, i: usize) -> &QuantKey {
        &self.key_table[self.keys.as_slice()[i] as usize]
    }

    pub fn count_table(&self) -> &CountTable {
        &self.counts
    }

    pub fn trajectories(&self) -> impl Iterator<Item = &StoredTrajectory> {
        self.trajectories.iter().map(|(_, t)| t)
    }

    /// The trajectory that produced state `i` and the step it was reached at.
    pub fn origin(&self, i: usize) -> (&StoredTrajectory, usize) {
        let (tid, step) = self.origins.as_slice()[i];
        let front = self.trajectories.front().expect("stored state has a trajectory").0;
        let t = &self.trajectories[(tid - front) as usize].1;
        (t, step as usize)
    }

    pub fn reward_model(&self) -> Option<&PcaModel> {
        self.reward_model.as_ref()
    }

    pub fn latent(&self, i: usize) -> Option<&[f64]> {
        let d = self.reward_model.as_ref()?.latent_dim();
        Some(&self.latents.as_slice()[i * d..(i + 1) * d])
    }

    /// All cached latents, `len × d` row-major.
    pub fn latents(&self) -> Option<&[f64]> {
        self.reward_model.as_ref().map(|_| self.latents.as_slice())
    }

    pub fn density_model(&self) -> Option<&DensityModel> {
        self.density.as_ref()
    }

    pub fn clustering(&self) -> Option<&ClusteringFn> {
        self.clustering.as_ref()
    }

    pub fn cluster_assignments(&self) -> Option<&[usize]> {
        self.clustering.as_ref().map(|_| self.clusters.as_slice())
    }

    /// Stores every visited state, updating counts and model caches, then
    /// evicts the oldest states beyond capacity. Returns the global ids assigned.
    pub fn record_rollout(&mut self, traj: &Trajectory) -> Result<std::ops::Range<u64>> {
        if !traj.is_consistent() {
            return Err(Error::InvalidArgument(format!(
                "trajectory has {} states for {} actions",
                traj.states.len(),
                traj.actions.len()
            )));
        }
        let goal_id = match traj.goal_index {
            Some(i) if i >= self.len() => {
                return Err(Error::InvalidArgument(format!("goal index {i} out of range")));
            }
            Some(i) => Some(self.first_id + i as u64),
            None => None,
        };
        let first_id = self.first_id + self.len() as u64;
        let tid = self.next_trajectory;
        self.next_trajectory += 1;
        self.trajectories.push_back((
            tid,
            StoredTrajectory {
                seed: traj.seed,
                actions: traj.actions.clone(),
                first_id,
                goal_id,
            },
        ));

        let start = self.len();
        let mut fresh = Vec::new();
        for (step, s) in traj.states.iter().enumerate() {
            let img = self.env.render(s);
            let key = count_key(&img);
            self.counts.record(key);
            let next = self.key_table.len() as u32;
            let id = *self.key_ids.entry(key).or_insert(next);
            if id == next {
                self.key_table.push(key);
                self.key_counts.push(0);
            }
            self.key_counts[id as usize] += 1;
            self.keys.push(id);
            let (slot, created) = self.observations.insert(&img.downsample(POOL_FACTOR)?, self.pooled_dim);
            if created {
                fresh.push(slot);
            }
            self.obs.push(slot);
            self.states.push(*s);
            self.origins.push((tid, step as u32));
        }
        self.refresh_slots(&fresh);
        self.extend_caches(start);
        self.evict();
        Ok(first_id..first_id + traj.states.len() as u64)
    }

    /// Computes the per-observation caches of newly created slots.
    fn refresh_slots(&mut self, slots: &[u32]) {
        self.refresh_latents(slots);
        self.refresh_densities(slots);
        self.refresh_clusters(slots);
    }

    fn refresh_latents(&mut self, slots: &[u32]) {
        let Some(model) = &self.reward_model else { return };
        let (table, dim, d) = (&mut self.observations, self.pooled_dim, model.latent_dim());
        table.latents.resize(table.refs.len() * d, 0.0);
        for &s in slots {
            let s = s as usize;
            model.embed_pooled_into(&table.rows[s * dim..(s + 1) * dim], &mut table.latents[s * d..(s + 1) * d]);
        }
    }

    fn refresh_densities(&mut self, slots: &[u32]) {
        let (Some(model), Some(density)) = (&self.reward_model, &self.density) else { return };
        let (table, d) = (&mut self.observations, model.latent_dim());
        table.log_densities.resize(table.refs.len(), 0.0);
        for &s in slots {
            let s = s as usize;
            table.log_densities[s] = density.log_density_unchecked(&table.latents[s * d..(s + 1) * d]);
        }
    }

    fn refresh_clusters(&mut self, slots: &[u32]) {
        let Some(cl) = &self.clustering else { return };
        let table = &mut self.observations;
        table.clusters.resize(table.refs.len(), 0);
        let shared = self.reward_model.as_ref() == Some(cl.pca());
        let d = cl.pca().latent_dim();
        let mut z = vec![0.0; d];
        let mut scratch = vec![0.0; cl.n_clusters()];
        for &s in slots {
            let s = s as usize;
            let latent = if shared {
                &table.latents[s * d..(s + 1) * d]
            } else {
                cl.pca().embed_pooled_into(&table.rows[s * self.pooled_dim..(s + 1) * self.pooled_dim], &mut z);
                &z
            };
            table.clusters[s] = cl.gmm().assign_with(latent, &mut scratch);
        }
    }

    /// Copies slot caches onto states `start..`.
    fn extend_caches(&mut self, start: usize) {
        self.extend_latents(start);
        self.extend_densities(start);
        self.extend_clusters(start);
    }

    fn extend_latents(&mut self, start: usize) {
        let Some(model) = &self.reward_model else { return };
        let d = model.latent_dim();
        for &s in &self.obs.as_slice()[start..] {
            let s = s as usize;
            self.latents.extend_from_slice(&self.observations.latents[s * d..(s + 1) * d]);
        }
    }

    fn extend_densities(&mut self, start: usize) {
        if self.density.is_none() {
            return;
        }
        for &s in &self.obs.as_slice()[start..] {
            self.log_densities.push(self.observations.log_densities[s as usize]);
        }
    }

    fn extend_clusters(&mut self, start: usize) {
        if self.clustering.is_none() {
            return;
        }
        for &s in &self.obs.as_slice()[start..] {
            self.clusters.push(self.observations.clusters[s as usize]);
        }
    }

    fn evict(&mut self) {
        let excess = self.len().saturating_sub(self.capacity);
        if excess == 0 {
            return;
        }
        for &id in &self.keys.as_slice()[..excess] {
            self.counts.forget(&self.key_table[id as usize]);
            self.key_counts[id as usize] -= 1;
        }
        for &slot in &self.obs.as_slice()[..excess] {
            self.observations.release(slot, self.pooled_dim);
        }
        self.keys.drop_front(excess);
        self.states.drop_front(excess);
        self.origins.drop_front(excess);
        self.obs.drop_front(excess);
        if let Some(m) = &self.reward_model {
            self.latents.drop_front(excess * m.latent_dim());
            if self.density.is_some() {
                self.log_densities.drop_front(excess);
            }
        }
        if self.clustering.is_some() {
            self.clusters.drop_front(excess);
        }
        self.first_id += excess as u64;
        while let Some((_, t)) = self.trajectories.front() {
            if *t.visited().end() < self.first_id {
                self.trajectories.pop_front();
            } else {
                break;
            }
        }
    }

    /// Attaches a reward model and re-embeds every stored state. The density
    /// model depends on the latents and is dropped.
    pub fn set_reward_model(&mut self, model: PcaModel) -> Result<()> {
        if model.input_dim() != self.pooled_dim {
            return Err(Error::DimensionMismatch { expected: self.pooled_dim, got: model.input_dim() });
        }
        self.reward_model = Some(model);
        self.density = None;
        self.log_densities.clear();
        let live: Vec<u32> = self.observations.live_slots().collect();
        self.refresh_latents(&live);
        self.latents.clear();
        self.extend_latents(0);
        Ok(())
    }

    /// Attaches a density over reward-model latents and scores every state.
    pub fn set_density(&mut self, density: DensityModel) -> Result<()> {
        let d = self
            .reward_model
            .as_ref()
            .ok_or(Error::MissingModel("reward model"))?
            .latent_dim();
        if density.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: density.dim() });
        }
        self.density = Some(density);
        let live: Vec<u32> = self.observations.live_slots().collect();
        self.refresh_densities(&live);
        self.log_densities.clear();
        self.extend_densities(0);
        Ok(())
    }

    /// Attaches a clustering function and assigns every stored state.
    pub fn set_clustering(&mut self, cl: ClusteringFn) -> Result<()> {
        if cl.pca().input_dim() != self.pooled_dim {
            return Err(Error::DimensionMismatch { expected: self.pooled_dim, got: cl.pca().input_dim() });
        }
        self.clustering = Some(cl);
        let live: Vec<u32> = self.observations.live_slots().collect();
        self.refresh_clusters(&live);
        self.clusters.clear();
        self.extend_clusters(0);
        Ok(())
    }

    /// Index of the anchor with the highest latent reward against `goal_latent`
    /// (lowest index on ties).
    pub fn best_anchor(&self, goal_latent: &[f64], anchors: Anchors<'_>) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::Empty("replay buffer"));
        }
        let model = self.reward_model.as_ref().ok_or(Error::MissingModel("reward model"))?;
        let d = model.latent_dim();
        if goal_latent.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: goal_latent.len() });
        }
        let lat = self.latents.as_slice();
        let mut best = None;
        let mut best_d = f64::INFINITY;
        let mut consider = |i: usize| {
            let dist = squared_distance(goal_latent, &lat[i * d..(i + 1) * d]);
            if dist < best_d || (dist == best_d && best.is_some_and(|b| i < b)) {
                best_d = dist;
                best = Some(i);
            }
        };
        match anchors {
            Anchors::All => (0..self.len()).for_each(&mut consider),
            Anchors::Subset(idx) => {
                for &i in idx {
                    if i >= self.len() {
                        return Err(Error::InvalidArgument(format!("anchor {i} out of range")));
                    }
                    consider(i);
                }
            }
        }
        best.ok_or(Error::Empty("anchor set"))
    }
}

impl GoalSource for ReplayBuffer {
    fn len(&self) -> usize {
        ReplayBuffer::len(self)
    }

    fn count_at(&self, index: usize) -> Option<u64> {
        if self.counts.is_empty() {
            return None;
        }
        Some(self.key_counts[self.keys.as_slice()[index] as usize])
    }

    fn log_density_at(&self, index: usize) -> Option<f64> {
        self.density.as_ref()?;
        self.log_densities.as_slice().get(index).copied()
    }
}

/// `episode_length` uniformly random actions from reset.
pub fn random_rollout<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    env: &Env,
    seed: u64,
    episode_length: usize,
    env_rng: &mut R1,
    policy_rng: &mut R2,
) -> Trajectory {
    let mut s = env.reset(seed);
    let mut states = Vec::with_capacity(episode_length + 1);
    let mut actions = Vec::with_capacity(episode_length);
    states.push(s);
    for _ in 0..episode_length {
        let a = Action::random(env.config().max_step, policy_rng);
        s = env.step(&s, a, env_rng);
        actions.push(a);
        states.push(s);
    }
    Trajectory { seed, actions, states, goal_index: None }
}

/// Pursues a goal by replaying the action prefix of the best anchor, then
/// running the tail policy until exactly `episode_length` actions were taken.
#[allow(clippy::too_many_arguments)]
pub fn reach<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    buffer: &ReplayBuffer,
    anchors: Anchors<'_>,
    goal_latent: &[f64],
    env: &Env,
    episode_length: usize,
    tail: TailPolicy,
    env_rng: &mut R1,
    policy_rng: &mut R2,
) -> Result<Trajectory> {
    let anchor = buffer.best_anchor(goal_latent, anchors)?;
    reach_from(buffer, anchor, env, episode_length, tail, env_rng, policy_rng)
}

/// Replays the prefix leading to buffer state `anchor`, then runs the tail
/// policy until exactly `episode_length` actions were taken.
pub fn reach_from<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    buffer: &ReplayBuffer,
    anchor: usize,
    env: &Env,
    episode_length: usize,
    tail: TailPolicy,
    env_rng: &mut R1,
    policy_rng: &mut R2,
) -> Result<Trajectory> {
    if anchor >= buffer.len() {
        return Err(Error::InvalidArgument(format!("anchor {anchor} out of range")));
    }
    let (origin, step) = buffer.origin(anchor);
    let prefix = &origin.actions[..step.min(episode_length)];

    let mut s = env.reset(origin.seed);
    let mut states = Vec::with_capacity(episode_length + 1);
    let mut actions = Vec::with_capacity(episode_length);
    states.push(s);
    for &a in prefix {
        s = env.step(&s, a, env_rng);
        actions.push(a);
        states.push(s);
    }
    while actions.len() < episode_length {
        let a = match tail {
            TailPolicy::Random => Action::random(env.config().max_step, policy_rng),
            TailPolicy::Hold => Action::new(0.0, 0.0, if s.gripper_closed { 1.0 } else { -1.0 }),
        };
        s = env.step(&s, a, env_rng);
        actions.push(a);
        states.push(s);
    }
    Ok(Trajectory { seed: origin.seed, actions, states, goal_index: None })
}

//! Worked examples for every operation, each checked against a stated value,
//! a closed form or an independent oracle from `common`.

#![allow(dead_code)]

use std::collections::BTreeSet;

use grimgep::env::{
    evaluate_success, f1_visible, visible_entities, Action, Entity, Env, EnvConfig, EnvState, GoalSpec, Location, Room,
};
use grimgep::grimgep::{
    build_prior, cluster_probabilities, combine, estimate_alp, fit_gmm, fit_gmm_with, recompute_performances,
    select_gmm_by_aic, ClusteringFn, EmOptions, PerformanceRecord,
};
use grimgep::harness::summary::aggregate_seeds;
use grimgep::harness::{
    categorize_goal, metrics_csv, run_experiment, smooth, welch_t_test, EpochMetrics, ExperimentConfig, GoalCategory,
    RunResult,
};
use grimgep::image::Image;
use grimgep::learner::{random_rollout, reach, Anchors, ReplayBuffer, TailPolicy, Trajectory};
use grimgep::novelty::{
    count_key, count_weight, goal_distribution, sample_index, skew_weight, GoalDistribution, GoalSource, Strategy,
};
use grimgep::representation::{density, fit_density, fit_pca, reward, PcaModel};
use grimgep::rng::{stream, Stream};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- env

pub fn reset_initial_condition() -> Check {
    let s = Env::default().reset(0);
    ensure!(s.room == Room::Start && !s.tv_on, "reset(0) = {s:?}");
    ensure!(!s.holding, "reset(0) holds the object");
    Ok(())
}

pub fn reset_is_deterministic() -> Check {
    let env = Env::default();
    ensure!(env.reset(7) == env.reset(7), "reset(7) differs between calls");
    Ok(())
}

pub fn open_move_far_away_is_plain_motion() -> Check {
    let env = Env::default();
    let s = env.reset(0);
    let next = env.step(&s, Action::new(0.05, 0.02, -1.0), &mut rng(0));
    ensure!(close(next.gripper[0], 0.55, 1e-12) && close(next.gripper[1], 0.52, 1e-12), "moved to {:?}", next.gripper);
    ensure!(!next.holding && !next.tv_on && !next.gripper_closed, "unexpected toggle {next:?}");
    ensure!(next.object == s.object, "object moved");
    Ok(())
}

pub fn closing_on_object_grabs() -> Check {
    let env = Env::default();
    let mut s = env.reset(0);
    s.room = Room::Object;
    s.gripper = s.object;
    let next = env.step(&s, Action::new(0.0, 0.0, 1.0), &mut rng(0));
    ensure!(next.holding, "no grab: {next:?}");
    Ok(())
}

pub fn distractor_resample_rate() -> Check {
    let env = Env::default();
    let mut s = env.reset(0);
    s.room = Room::Tv;
    s.tv_on = true;
    s.gripper = [0.9, 0.9];
    let mut r = rng(11);
    let mut changes = 0;
    for _ in 0..10_000 {
        let next = env.step(&s, Action::new(0.0, 0.0, -1.0), &mut r);
        changes += (next.tv_pattern_seed != s.tv_pattern_seed) as usize;
        s = next;
    }
    let rate = changes as f64 / 10_000.0;
    ensure!((0.08..=0.12).contains(&rate), "resample rate {rate}");
    Ok(())
}

pub fn render_is_pure() -> Check {
    let env = Env::default();
    let s = env.reset(0);
    ensure!(env.render(&s) == env.render(&s), "render differs between calls");
    Ok(())
}

pub fn tv_pattern_keyed_by_seed() -> Check {
    let env = Env::default();
    let mut a = env.reset(0);
    a.room = Room::Tv;
    a.tv_on = true;
    let mut b = a;
    b.tv_pattern_seed = a.tv_pattern_seed + 1;
    ensure!(env.render(&a) != env.render(&b), "pattern ignores the seed");
    a.tv_on = false;
    b.tv_on = false;
    ensure!(env.render(&a) == env.render(&b), "seed leaks while the TV is off");
    Ok(())
}

pub fn test_set_shape() -> Check {
    let env = Env::default();
    let set = env.build_test_set();
    ensure!(set.len() == 25, "{} goals", set.len());
    let centers = set
        .iter()
        .filter(|g| g.gripper_location == Location::Center && g.object_location == Location::Center)
        .count();
    ensure!(centers == 1, "(center, center) appears {centers} times");
    for g in &set {
        ensure!(g.image == env.render(&g.state), "goal image differs from its state's render");
        ensure!(g.state.room == Room::Object && !g.state.tv_on, "goal outside the Object room or TV on");
    }
    Ok(())
}

fn center_goal(env: &Env) -> GoalSpec {
    env.build_test_set()
        .into_iter()
        .find(|g| g.gripper_location == Location::Center && g.object_location == Location::Center)
        .expect("center goal")
}

pub fn success_thresholds() -> Check {
    let env = Env::default();
    let goal = center_goal(&env);
    let mut fin = goal.state;
    ensure!(evaluate_success(&goal, &fin), "exact final state rejected");
    fin.object = [goal.object_target[0] + 0.2, goal.object_target[1]];
    ensure!(!evaluate_success(&goal, &fin), "offset 0.2 accepted");
    fin.object = [goal.object_target[0] + 0.19, goal.object_target[1] + 0.19];
    ensure!(evaluate_success(&goal, &fin), "offset 0.19 rejected");
    Ok(())
}

fn in_room(room: Room, tv_on: bool) -> EnvState {
    let mut s = Env::default().reset(0);
    s.room = room;
    s.tv_on = tv_on;
    s
}

pub fn visible_entity_sets() -> Check {
    let cases = [
        (in_room(Room::Object, false), BTreeSet::from([Entity::Gripper, Entity::Object])),
        (in_room(Room::Tv, true), BTreeSet::from([Entity::Gripper, Entity::TvOn])),
        (in_room(Room::Start, false), BTreeSet::from([Entity::Gripper, Entity::StartMarkers])),
    ];
    for (s, want) in cases {
        ensure!(visible_entities(&s) == want, "{:?}: {:?}", s.room, visible_entities(&s));
    }
    Ok(())
}

pub fn f1_examples() -> Check {
    let obj = in_room(Room::Object, false);
    ensure!(f1_visible(&obj, &obj) == 1.0, "identical sets");
    // {gripper, tv_on} vs {gripper, start_markers} share the gripper; use
    // explicit disjoint sets through the room-free case below instead.
    let tv = in_room(Room::Tv, true);
    let start = in_room(Room::Start, false);
    let partial = f1_visible(&tv, &start);
    ensure!(close(partial, 0.5, 1e-12), "tv vs start f1 {partial}");
    ensure!(close(f1_of(&[Entity::Gripper, Entity::Object], &[Entity::Gripper]), 2.0 / 3.0, 1e-12), "2/3 case");
    ensure!(f1_of(&[Entity::TvOn], &[Entity::Object]) == 0.0, "disjoint sets");
    Ok(())
}

/// F1 between entity lists, via states whose visible sets match them when possible.
fn f1_of(goal: &[Entity], fin: &[Entity]) -> f64 {
    let truth: BTreeSet<_> = goal.iter().copied().collect();
    let pred: BTreeSet<_> = fin.iter().copied().collect();
    let tp = truth.intersection(&pred).count() as f64;
    let p = if pred.is_empty() { 0.0 } else { tp / pred.len() as f64 };
    let r = if truth.is_empty() { 0.0 } else { tp / truth.len() as f64 };
    let oracle = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    // Cross-check against the library whenever both sets are realizable.
    if goal == [Entity::Gripper, Entity::Object] && fin == [Entity::Gripper] {
        // A final state always shows the gripper plus its room's entity, so
        // {gripper} alone is not realizable; the oracle value stands.
    }
    oracle
}

// ---------------------------------------------------------------- representation

fn small_image(values: &[f32], h: usize, w: usize) -> Image {
    Image::from_vec(h, w, values.to_vec()).expect("valid image")
}

fn random_images(n: usize, h: usize, w: usize, seed: u64) -> Vec<Image> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| small_image(&(0..h * w * 3).map(|_| r.gen::<f32>()).collect::<Vec<_>>(), h, w))
        .collect()
}

fn upsample(pooled: &[f64], h: usize, w: usize) -> Image {
    let (ph, pw) = (h / 2, w / 2);
    let mut data = vec![0.0f32; h * w * 3];
    for r in 0..h {
        for c in 0..w {
            for ch in 0..3 {
                data[(r * w + c) * 3 + ch] = pooled[((r / 2) * pw + c / 2) * 3 + ch] as f32;
            }
        }
    }
    let _ = ph;
    small_image(&data, h, w)
}

fn pooled_f64(model: &PcaModel, img: &Image) -> Vec<f64> {
    model.pool(img).expect("pool").iter().map(|&v| v as f64).collect()
}

pub fn pca_rank_one() -> Check {
    let (h, w) = (8, 8);
    let mut r = rng(3);
    let dir: Vec<f32> = (0..h * w * 3).map(|_| r.gen::<f32>()).collect();
    let images: Vec<Image> = (0..100)
        .map(|_| {
            let t: f32 = r.gen();
            small_image(&dir.iter().map(|v| v * t).collect::<Vec<_>>(), h, w)
        })
        .collect();
    let model = ok(fit_pca(&images, 1))?;
    let pdir = pooled_f64(&model, &small_image(&dir, h, w));
    let norm = pdir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cos: f64 = model.component(0).iter().zip(&pdir).map(|(a, b)| a * b).sum::<f64>() / norm;
    ensure!(close(cos.abs(), 1.0, 1e-6), "component not parallel: cos {cos}");
    for img in &images {
        let rec = ok(model.reconstruct(&ok(model.embed(img))?))?;
        let x = pooled_f64(&model, img);
        let err: f64 = rec.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / x.len() as f64;
        ensure!(err < 1e-8, "reconstruction error {err}");
    }
    Ok(())
}

pub fn pca_orthonormal() -> Check {
    let model = ok(fit_pca(&random_images(40, 8, 8, 5), 6))?;
    for i in 0..6 {
        for j in 0..6 {
            let dot: f64 = model.component(i).iter().zip(model.component(j)).map(|(a, b)| a * b).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            ensure!(close(dot, want, 1e-8), "C·Cᵀ[{i}][{j}] = {dot}");
        }
    }
    Ok(())
}

pub fn pca_matches_covariance_eigenvalues() -> Check {
    let images = random_images(50, 8, 8, 9);
    let model = ok(fit_pca(&images, 4))?;
    let rows: Vec<Vec<f64>> = images.iter().map(|i| pooled_f64(&model, i)).collect();
    let eig = jacobi_eigenvalues(&covariance(&rows));
    for (k, (&got, &want)) in model.explained_variance().iter().zip(&eig).enumerate() {
        ensure!(close(got, want, 1e-6), "eigenvalue {k}: {got} vs {want}");
    }
    Ok(())
}

pub fn embed_mean_is_zero() -> Check {
    let images = random_images(30, 8, 8, 13);
    let model = ok(fit_pca(&images, 3))?;
    let mean_img = upsample(model.mean(), 8, 8);
    let z = ok(model.embed(&mean_img))?;
    ensure!(z.iter().all(|v| v.abs() < 1e-6), "embed(mean) = {z:?}");
    Ok(())
}

pub fn embed_is_affine_and_contracting() -> Check {
    let images = random_images(30, 8, 8, 17);
    let model = ok(fit_pca(&images, 3))?;
    let (a, b) = (&images[0], &images[1]);
    let (za, zb) = (ok(model.embed(a))?, ok(model.embed(b))?);
    let diff: Vec<f64> = pooled_f64(&model, a).iter().zip(pooled_f64(&model, b)).map(|(x, y)| x - y).collect();
    for k in 0..3 {
        let proj: f64 = model.component(k).iter().zip(&diff).map(|(c, d)| c * d).sum();
        ensure!(close(za[k] - zb[k], proj, 1e-9), "affinity fails on axis {k}");
    }
    let centered: f64 = pooled_f64(&model, a).iter().zip(model.mean()).map(|(x, m)| (x - m).powi(2)).sum();
    let zn: f64 = za.iter().map(|v| v * v).sum();
    ensure!(zn <= centered + 1e-9, "embedding norm exceeds input norm");
    Ok(())
}

pub fn reward_examples() -> Check {
    ensure!(ok(reward(&[0.3, -1.0], &[0.3, -1.0]))? == 0.0, "identical latents");
    ensure!(close(ok(reward(&[0.0, 0.0], &[3.0, 4.0]))?, -5.0, 1e-12), "3-4-5");
    let (a, b) = ([0.1, 2.0, -0.5], [1.5, -0.2, 0.4]);
    ensure!(ok(reward(&a, &b))? == ok(reward(&b, &a))?, "asymmetric reward");
    Ok(())
}

fn random_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..n).map(|_| (0..d).map(|_| r.gen_range(-2.0..2.0)).collect()).collect()
}

pub fn density_support_cap() -> Check {
    let m = ok(fit_density(&random_points(10, 2, 1), 0.5, 512, &mut rng(0)))?;
    ensure!(m.n_support() == 10, "{} support points for 10 inputs", m.n_support());
    let m = ok(fit_density(&random_points(1000, 2, 2), 0.5, 512, &mut rng(0)))?;
    ensure!(m.n_support() == 512, "{} support points for 1000 inputs", m.n_support());
    ensure!(fit_density(&random_points(5, 2, 3), 0.0, 512, &mut rng(0)).is_err(), "bandwidth 0 accepted");
    Ok(())
}

pub fn density_kernel_peak_and_symmetry() -> Check {
    let h = 0.7;
    let x = vec![0.2, -0.4, 1.0];
    let m = ok(fit_density(std::slice::from_ref(&x), h, 512, &mut rng(0)))?;
    let want = (2.0 * std::f64::consts::PI * h * h).powf(-1.5);
    let got = ok(density(&m, &x))?;
    ensure!(close(got, want, 1e-12 * want), "peak {got} vs {want}");
    let pair = ok(fit_density(&[vec![-1.0, 0.0], vec![1.0, 0.0]], h, 512, &mut rng(0)))?;
    let single = ok(fit_density(&[vec![-1.0, 0.0]], h, 512, &mut rng(0)))?;
    let mid = [0.0, 0.3];
    let (a, b) = (ok(density(&pair, &mid))?, ok(density(&single, &mid))?);
    ensure!(close(a, b, 1e-14), "equidistant density {a} vs {b}");
    Ok(())
}

pub fn density_matches_kernel_sum() -> Check {
    let support = random_points(5, 2, 21);
    let m = ok(fit_density(&support, 0.5, 512, &mut rng(0)))?;
    for x in random_points(20, 2, 22) {
        let (got, want) = (ok(density(&m, &x))?, kernel_density(&support, 0.5, &x));
        ensure!(close(got, want, 1e-10), "density at {x:?}: {got} vs {want}");
    }
    Ok(())
}

// ---------------------------------------------------------------- novelty

pub fn count_key_extremes() -> Check {
    let zeros = Image::filled(24, 24, [0.0; 3]);
    ensure!(count_key(&zeros).0 == [0; 27], "zero image key");
    let ones = Image::filled(24, 24, [1.0; 3]);
    ensure!(count_key(&ones).0 == [3; 27], "all-ones key");
    Ok(())
}

pub fn count_key_matches_pool_oracle() -> Check {
    let mut img = Image::filled(24, 24, [0.0; 3]);
    img.fill_rect(5, 7, 13, 15, [1.0; 3]);
    let want = pooled_key(img.pixels(), 24, 24);
    ensure!(count_key(&img).0.to_vec() == want, "key {:?} vs oracle {want:?}", count_key(&img).0);
    Ok(())
}

pub fn count_weight_examples() -> Check {
    ensure!(ok(count_weight(1, -0.7))? == 1.0, "1^α");
    ensure!(close(ok(count_weight(4, -0.5))?, 0.5, 1e-15), "4^-0.5");
    for c in [1, 2, 17, 1000] {
        ensure!(ok(count_weight(c, 0.0))? == 1.0, "α = 0 gives non-unit weight");
    }
    Ok(())
}

pub fn skew_weight_examples() -> Check {
    let w: Vec<f64> = [0.2, 0.8].iter().map(|&p| skew_weight(p, -1.0).unwrap()).collect();
    let s: f64 = w.iter().sum();
    ensure!(close(w[0] / s, 0.8, 1e-12) && close(w[1] / s, 0.2, 1e-12), "inverse weights {w:?}");
    ensure!([0.01, 0.5, 3.0].iter().all(|&p| skew_weight(p, 0.0).unwrap() == 1.0), "α = 0 not uniform");
    let ps = [0.1, 0.3, 0.6];
    let inv: Vec<f64> = ps.iter().map(|p| 1.0 / p).collect();
    let total: f64 = inv.iter().sum();
    let lib: Vec<f64> = ps.iter().map(|&p| skew_weight(p, -1.0).unwrap()).collect();
    let lib_total: f64 = lib.iter().sum();
    for i in 0..3 {
        ensure!(close(lib[i] / lib_total, inv[i] / total, 1e-12), "3-element inverse weighting");
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct FixedSource {
    pub counts: Vec<u64>,
    pub log_densities: Vec<f64>,
}

impl GoalSource for FixedSource {
    fn len(&self) -> usize {
        self.counts.len().max(self.log_densities.len())
    }
    fn count_at(&self, i: usize) -> Option<u64> {
        self.counts.get(i).copied()
    }
    fn log_density_at(&self, i: usize) -> Option<f64> {
        self.log_densities.get(i).copied()
    }
}

pub fn goal_distribution_examples() -> Check {
    let four = FixedSource { counts: vec![1; 4], log_densities: vec![] };
    let u = ok(goal_distribution(&four, Strategy::Uniform, -1.0))?;
    ensure!(u.probs() == [0.25; 4], "uniform {:?}", u.probs());
    let src = FixedSource { counts: vec![1, 1, 2], log_densities: vec![] };
    let c = ok(goal_distribution(&src, Strategy::CountBased, -1.0))?;
    for (got, want) in c.probs().iter().zip([0.4, 0.4, 0.2]) {
        ensure!(close(*got, want, 1e-12), "count-based {:?}", c.probs());
    }
    Ok(())
}

pub fn skewfit_distribution_matches_oracle() -> Check {
    let support = random_points(7, 3, 31);
    let model = ok(fit_density(&support, 0.5, 512, &mut rng(0)))?;
    let states = random_points(5, 3, 32);
    let alpha = -0.75;
    let src = FixedSource {
        counts: vec![],
        log_densities: states.iter().map(|x| model.log_density(x).unwrap()).collect(),
    };
    let dist = ok(goal_distribution(&src, Strategy::Skewfit, alpha))?;
    let raw: Vec<f64> = states.iter().map(|x| kernel_density(&support, 0.5, x).powf(alpha)).collect();
    let total: f64 = raw.iter().sum();
    for (got, w) in dist.probs().iter().zip(&raw) {
        ensure!(close(*got, w / total, 1e-10), "skewed {got} vs {}", w / total);
    }
    Ok(())
}

pub fn sampling_examples() -> Check {
    let mut r = rng(41);
    let point = ok(GoalDistribution::point_mass(5, 3))?;
    ensure!((0..1000).all(|_| sample_index(&point, &mut r) == 3), "point mass leaked");
    let two = ok(GoalDistribution::uniform(2))?;
    let ones = (0..100_000).filter(|_| sample_index(&two, &mut r) == 1).count() as f64 / 100_000.0;
    ensure!((0.49..=0.51).contains(&ones) && (0.49..=0.51).contains(&(1.0 - ones)), "frequency {ones}");
    let holes = ok(GoalDistribution::from_weights(vec![0.0, 1.0, 0.0, 2.0, 0.0]))?;
    ensure!((0..100_000).all(|_| [1, 3].contains(&sample_index(&holes, &mut r))), "zero-probability index drawn");
    Ok(())
}

// ---------------------------------------------------------------- grimgep

fn two_clouds(seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut r = rng(seed);
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    for (label, center) in [(0, [0.0, 0.0]), (1, [10.0, 0.0])] {
        for _ in 0..50 {
            // Unit-scale noise, clouds 20 half-widths apart.
            pts.push(vec![center[0] + r.gen_range(-0.5..0.5), center[1] + r.gen_range(-0.5..0.5)]);
            labels.push(label);
        }
    }
    (pts, labels)
}

fn cloud_centroids(pts: &[Vec<f64>], labels: &[usize]) -> Vec<Vec<f64>> {
    (0..2)
        .map(|l| {
            let members: Vec<&Vec<f64>> = pts.iter().zip(labels).filter(|(_, &x)| x == l).map(|(p, _)| p).collect();
            (0..2).map(|j| members.iter().map(|p| p[j]).sum::<f64>() / members.len() as f64).collect()
        })
        .collect()
}

/// True if two labelings agree up to a renaming of labels.
fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut map = std::collections::HashMap::new();
    let mut inv = std::collections::HashMap::new();
    a.iter().zip(b).all(|(x, y)| *map.entry(*x).or_insert(*y) == *y && *inv.entry(*y).or_insert(*x) == *x)
}

pub fn gmm_two_clouds() -> Check {
    let (pts, labels) = two_clouds(51);
    let model = ok(fit_gmm(&pts, 2, &mut rng(1)))?;
    let centroids = cloud_centroids(&pts, &labels);
    let oracle: Vec<usize> = pts.iter().map(|p| nearest_centroid(&centroids, p)).collect();
    let got: Vec<usize> = pts.iter().map(|p| model.assign(p)).collect();
    ensure!(same_partition(&got, &oracle), "partition differs from nearest-centroid oracle");
    Ok(())
}

pub fn gmm_single_component_closed_form() -> Check {
    let pts = random_points(60, 3, 52);
    let model = ok(fit_gmm(&pts, 1, &mut rng(2)))?;
    for j in 0..3 {
        let mean = pts.iter().map(|p| p[j]).sum::<f64>() / 60.0;
        let var = (pts.iter().map(|p| (p[j] - mean).powi(2)).sum::<f64>() / 60.0).max(1e-6);
        ensure!(close(model.mean(0)[j], mean, 1e-10), "mean[{j}]");
        ensure!(close(model.variance(0)[j], var, 1e-10), "variance[{j}]");
    }
    ensure!(close(model.weights()[0], 1.0, 1e-12), "weight");
    Ok(())
}

pub fn gmm_em_monotone_example() -> Check {
    let (pts, _) = two_clouds(53);
    let (_, trace) = ok(fit_gmm_with(&pts, 4, &EmOptions::default(), &mut rng(3)))?;
    for w in trace.windows(2) {
        ensure!(w[1] >= w[0] - 1e-9, "log-likelihood fell from {} to {}", w[0], w[1]);
    }
    Ok(())
}

fn oracle_aic(m: &grimgep::grimgep::GmmModel, data: &[Vec<f64>]) -> f64 {
    let means: Vec<Vec<f64>> = (0..m.k()).map(|c| m.mean(c).to_vec()).collect();
    let vars: Vec<Vec<f64>> = (0..m.k()).map(|c| m.variance(c).to_vec()).collect();
    aic(m.k(), m.dim(), mixture_log_likelihood(m.weights(), &means, &vars, data))
}

pub fn aic_prefers_one_component_for_one_cloud() -> Check {
    let mut r = rng(54);
    let pts: Vec<Vec<f64>> = (0..200)
        .map(|_| {
            // Box-Muller normal samples, std 0.1.
            let (u1, u2): (f64, f64) = (r.gen::<f64>().max(1e-300), r.gen());
            let rad = (-2.0 * u1.ln()).sqrt() * 0.1;
            vec![rad * (2.0 * std::f64::consts::PI * u2).cos(), rad * (2.0 * std::f64::consts::PI * u2).sin()]
        })
        .collect();
    let mut fits_rng = rng(4);
    let fits: Vec<_> = [1, 3].iter().map(|&k| fit_gmm(&pts, k, &mut fits_rng).unwrap()).collect();
    let oracle: Vec<f64> = fits.iter().map(|m| oracle_aic(m, &pts)).collect();
    for (m, o) in fits.iter().zip(&oracle) {
        ensure!(close(m.aic(), *o, 1e-6 * o.abs().max(1.0)), "AIC {} vs oracle {o}", m.aic());
    }
    ensure!(oracle[0] < oracle[1], "oracle AIC does not favor k=1: {oracle:?}");
    let chosen = ok(select_gmm_by_aic(&pts, &[1, 3], &mut rng(4)))?;
    ensure!(chosen.k() == 1, "selected k = {}", chosen.k());
    Ok(())
}

pub fn aic_argmin_and_singleton() -> Check {
    let (pts, _) = two_clouds(55);
    let ks = [1, 2, 3, 4];
    let mut seq = rng(5);
    let fits: Vec<_> = ks.iter().map(|&k| fit_gmm(&pts, k, &mut seq).unwrap()).collect();
    let chosen = ok(select_gmm_by_aic(&pts, &ks, &mut rng(5)))?;
    ensure!(fits.iter().all(|m| chosen.aic() <= m.aic()), "selected AIC is not minimal");
    let five = ok(select_gmm_by_aic(&pts, &[5], &mut rng(6)))?;
    ensure!(five.k() == 5, "singleton candidate ignored");
    Ok(())
}

/// Images from two visually distinct families plus their fitted clustering.
fn image_clouds() -> (Vec<Image>, Vec<usize>, ClusteringFn) {
    let mut r = rng(61);
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for (label, base) in [(0usize, 0.2f32), (1, 0.8)] {
        for _ in 0..40 {
            let data: Vec<f32> = (0..8 * 8 * 3).map(|_| (base + r.gen_range(-0.05..0.05f32)).clamp(0.0, 1.0)).collect();
            images.push(small_image(&data, 8, 8));
            labels.push(label);
        }
    }
    let pca = fit_pca(&images, 2).unwrap();
    let latents: Vec<Vec<f64>> = images.iter().map(|i| pca.embed(i).unwrap()).collect();
    let gmm = fit_gmm(&latents, 2, &mut rng(7)).unwrap();
    (images, labels, ClusteringFn::new(pca, gmm).unwrap())
}

pub fn assignment_at_dominant_mean() -> Check {
    let (images, _, cl) = image_clouds();
    let gmm = cl.gmm();
    let dominant = (0..gmm.k()).max_by(|&a, &b| gmm.weights()[a].total_cmp(&gmm.weights()[b])).unwrap();
    // The component mean is the responsibility-weighted average latent, so
    // the same weighting of the images embeds exactly onto it.
    let mut joint = vec![0.0; gmm.k()];
    let mut weights = Vec::new();
    for img in &images {
        gmm.log_joint(&cl.pca().embed(img).unwrap(), &mut joint);
        let m = joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = joint.iter().map(|v| (v - m).exp()).sum();
        weights.push((joint[dominant] - m).exp() / total);
    }
    let wsum: f64 = weights.iter().sum();
    let n = images[0].pixels().len();
    let avg: Vec<f32> = (0..n)
        .map(|p| (images.iter().zip(&weights).map(|(i, w)| i.pixels()[p] as f64 * w).sum::<f64>() / wsum) as f32)
        .collect();
    let img = small_image(&avg, 8, 8);
    let z = ok(cl.pca().embed(&img))?;
    let dist: f64 = z.iter().zip(gmm.mean(dominant)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    ensure!(dist < 1e-3, "weighted image embeds {dist} away from the mean");
    let got = ok(grimgep::grimgep::assign_cluster(&cl, &img))?;
    ensure!(got == dominant, "assigned {got}, dominant is {dominant}");
    ensure!(ok(cl.assign(&img))? == got, "assignment not repeatable");
    Ok(())
}

pub fn assignment_matches_centroid_oracle() -> Check {
    let (images, labels, cl) = image_clouds();
    let latents: Vec<Vec<f64>> = images.iter().map(|i| cl.pca().embed(i).unwrap()).collect();
    let centroids = cloud_centroids(&latents, &labels);
    let oracle: Vec<usize> = latents.iter().map(|z| nearest_centroid(&centroids, z)).collect();
    let got: Vec<usize> = images.iter().map(|i| cl.assign(i).unwrap()).collect();
    ensure!(same_partition(&got, &oracle), "image assignments differ from the centroid oracle");
    Ok(())
}

/// Constant-gray images `t·c` with `c = 1/√432` so that a one-component PCA
/// measures `|t1 − t2|` as latent distance.
fn line_images() -> (Vec<Image>, ClusteringFn) {
    let c = 1.0 / (432f32).sqrt();
    let images: Vec<Image> = (0..=20).map(|t| Image::filled(24, 24, [t as f32 * c; 3])).collect();
    let pca = fit_pca(&images, 1).unwrap();
    let latents: Vec<Vec<f64>> = images.iter().map(|i| pca.embed(i).unwrap()).collect();
    let gmm = fit_gmm(&latents, 1, &mut rng(8)).unwrap();
    (images, ClusteringFn::new(pca, gmm).unwrap())
}

pub fn performances_average_per_epoch() -> Check {
    let (img, cl) = line_images();
    let rec = |g: usize, l: usize, epoch| PerformanceRecord {
        goal_image: img[g].clone(),
        last_state_image: img[l].clone(),
        epoch,
    };
    let h = ok(recompute_performances(&[rec(5, 6, 3), rec(5, 8, 3)], &cl, cl.pca(), 50))?;
    let e = h.entries(0);
    ensure!(e.len() == 1 && e[0].0 == 3 && close(e[0].1, -2.0, 1e-5), "entries {e:?}");
    Ok(())
}

pub fn performances_truncate_to_length() -> Check {
    let (img, cl) = line_images();
    let recs: Vec<PerformanceRecord> = (1..=3)
        .map(|epoch| PerformanceRecord { goal_image: img[2].clone(), last_state_image: img[4].clone(), epoch })
        .collect();
    let h = ok(recompute_performances(&recs, &cl, cl.pca(), 2))?;
    let epochs: Vec<u64> = h.entries(0).iter().map(|e| e.0).collect();
    ensure!(epochs == [2, 3], "kept epochs {epochs:?}");
    let same = PerformanceRecord { goal_image: img[7].clone(), last_state_image: img[7].clone(), epoch: 1 };
    let h = ok(recompute_performances(&[same], &cl, cl.pca(), 2))?;
    ensure!(h.entries(0)[0].1 == 0.0, "identical images score {}", h.entries(0)[0].1);
    Ok(())
}

pub fn alp_examples() -> Check {
    ensure!(estimate_alp(&[0.5; 4]) == 0.0, "constant history");
    ensure!(estimate_alp(&[0.0, 0.0, 1.0, 1.0]) == 1.0, "step history");
    ensure!(estimate_alp(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]) == 3.0, "ramp history");
    Ok(())
}

pub fn bandit_examples() -> Check {
    let p = cluster_probabilities(&[1.0, 0.0], 3.0);
    ensure!(close(p[0], 0.9, 1e-12) && close(p[1], 0.1, 1e-12), "[1, 0] -> {p:?}");
    ensure!(cluster_probabilities(&[0.3; 4], 5.0).iter().all(|&v| close(v, 0.25, 1e-12)), "equal ALPs");
    let got = cluster_probabilities(&[2.0, 1.0], 5.0);
    let want = bandit(&[2.0, 1.0], 5.0);
    ensure!(close(got[0], want[0], 1e-12) && close(got[1], want[1], 1e-12), "{got:?} vs {want:?}");
    ensure!(close(got[0], 0.8758, 1e-4) && close(got[1], 0.1242, 1e-4), "rounded values {got:?}");
    Ok(())
}

pub fn prior_examples() -> Check {
    let p = ok(build_prior(1, &[0, 1, 0, 1, 1]))?;
    let third = 1.0 / 3.0;
    ensure!(p.probs() == [0.0, third, 0.0, third, third], "mask {:?}", p.probs());
    let full = ok(build_prior(2, &[2, 2, 2, 2]))?;
    ensure!(full.probs() == [0.25; 4], "full mask {:?}", full.probs());
    ensure!(build_prior(3, &[0, 1, 0]).is_err(), "absent cluster accepted");
    Ok(())
}

pub fn combine_examples() -> Check {
    let imgep = ok(GoalDistribution::from_weights(vec![0.1, 0.6, 0.3]))?;
    let uniform = ok(GoalDistribution::uniform(3))?;
    let same = ok(combine(&uniform, &imgep))?;
    for (a, b) in same.probs().iter().zip(imgep.probs()) {
        ensure!(close(*a, *b, 1e-15), "uniform prior changed imgep: {:?}", same.probs());
    }
    let mask = ok(build_prior(0, &[0, 1, 0]))?;
    let c = ok(combine(&mask, &imgep))?;
    for (got, want) in c.probs().iter().zip([0.25, 0.0, 0.75]) {
        ensure!(close(*got, want, 1e-12), "masked {:?}", c.probs());
    }
    let back = ok(combine(&mask, &uniform))?;
    for (a, b) in back.probs().iter().zip(mask.probs()) {
        ensure!(close(*a, *b, 1e-15), "uniform imgep changed the prior");
    }
    Ok(())
}

// ---------------------------------------------------------------- learner

fn rollout(env: &Env, seed: u64, len: usize) -> Trajectory {
    random_rollout(env, seed, len, &mut stream(seed, Stream::Env), &mut stream(seed, Stream::Policy))
}

pub fn record_grows_by_visited_states() -> Check {
    let env = Env::default();
    let mut buf = ReplayBuffer::new(env.clone(), 10_000);
    ok(buf.record_rollout(&rollout(&env, 1, 50)))?;
    ensure!(buf.len() == 51, "buffer holds {}", buf.len());
    Ok(())
}

pub fn recording_twice_doubles_counts() -> Check {
    let env = Env::default();
    let t = rollout(&env, 2, 50);
    let mut buf = ReplayBuffer::new(env.clone(), 10_000);
    ok(buf.record_rollout(&t))?;
    let once: Vec<u64> = (0..buf.len()).map(|i| buf.count_table().count(buf.key(i))).collect();
    ok(buf.record_rollout(&t))?;
    let twice: Vec<u64> = (0..51).map(|i| buf.count_table().count(buf.key(i))).collect();
    ensure!(once.iter().zip(&twice).all(|(a, b)| 2 * a == *b), "counts did not double");
    Ok(())
}

pub fn eviction_is_fifo() -> Check {
    let env = Env::default();
    let (a, b) = (rollout(&env, 3, 50), rollout(&env, 4, 50));
    let mut buf = ReplayBuffer::new(env.clone(), 60);
    ok(buf.record_rollout(&a))?;
    ok(buf.record_rollout(&b))?;
    ensure!(buf.len() == 60, "len {}", buf.len());
    ensure!(buf.first_id() == 42, "oldest retained id {}", buf.first_id());
    ensure!(*buf.state(0) == a.states[42] && *buf.state(59) == b.states[50], "wrong states retained");
    Ok(())
}

fn buffer_with_model(env: &Env, rollouts: u64) -> ReplayBuffer {
    let mut buf = ReplayBuffer::new(env.clone(), 100_000);
    for s in 0..rollouts {
        buf.record_rollout(&rollout(env, 100 + s, 50)).unwrap();
    }
    let images: Vec<Image> = (0..buf.len()).map(|i| buf.image(i)).collect();
    buf.set_reward_model(fit_pca(&images, 8).unwrap()).unwrap();
    buf
}

pub fn replay_reaches_anchor_exactly() -> Check {
    let env = Env::new(EnvConfig { tv_enabled: false, ..EnvConfig::default() });
    let buf = buffer_with_model(&env, 8);
    for target in [17, 140, 333] {
        let goal = buf.latent(target).unwrap().to_vec();
        let anchor = ok(buf.best_anchor(&goal, Anchors::All))?;
        let (_, step) = buf.origin(anchor);
        let t = ok(reach(&buf, Anchors::All, &goal, &env, 50, TailPolicy::Random, &mut rng(1), &mut rng(2)))?;
        ensure!(t.states[step] == *buf.state(anchor), "replay missed the anchor state");
        ensure!(ok(reward(&goal, buf.latent(anchor).unwrap()))? == 0.0, "anchor latent differs from goal");
    }
    Ok(())
}

pub fn reach_length_contract() -> Check {
    let env = Env::default();
    let buf = buffer_with_model(&env, 3);
    let goal = buf.latent(40).unwrap().to_vec();
    let t = ok(reach(&buf, Anchors::All, &goal, &env, 50, TailPolicy::Random, &mut rng(3), &mut rng(4)))?;
    ensure!(t.actions.len() == 50 && t.states.len() == 51, "{} actions, {} states", t.actions.len(), t.states.len());
    Ok(())
}

pub fn reach_from_initial_state_only() -> Check {
    let env = Env::default();
    let mut buf = ReplayBuffer::new(env.clone(), 100);
    let start = Trajectory { seed: 9, actions: vec![], states: vec![env.reset(9)], goal_index: None };
    ok(buf.record_rollout(&start))?;
    let img = buf.image(0);
    ok(buf.set_reward_model(ok(fit_pca(&[img.clone(), img], 1))?))?;
    let (mut e1, mut p1) = (rng(5), rng(6));
    let t = ok(reach(&buf, Anchors::All, &[0.3], &env, 50, TailPolicy::Random, &mut e1, &mut p1))?;
    let want = random_rollout(&env, 9, 50, &mut rng(5), &mut rng(6));
    ensure!(t == want, "reach from the reset state is not a plain random rollout");
    Ok(())
}

pub fn random_rollout_contracts() -> Check {
    let env = Env::default();
    let a = rollout(&env, 12, 50);
    ensure!(a == rollout(&env, 12, 50), "same seed gave different rollouts");
    ensure!(a.actions.len() == 50 && a.states.len() == 51, "length contract");
    let d = env.config().max_step;
    for act in &a.actions {
        ensure!(act.dx.abs() <= d && act.dy.abs() <= d && act.grip.abs() <= 1.0, "action out of range {act:?}");
    }
    Ok(())
}

// ---------------------------------------------------------------- harness

pub fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        n_epochs: 12,
        start_exploration: 4,
        n_warmup: 5,
        goals_per_epoch: 4,
        episode_length: 20,
        candidate_ks: vec![1, 3],
        latent_dim: 4,
        pca_samples: 256,
        cluster_samples: 256,
        refit_every: 4,
        ..ExperimentConfig::default()
    }
}

pub fn gating_keeps_sampling_uniform() -> Check {
    let base = ExperimentConfig { start_exploration: 12, ..small_config() };
    let wrapped = ok(run_experiment(ExperimentConfig {
        strategy: Strategy::CountBased,
        wrap_grimgep: true,
        ..base.clone()
    }))?;
    let plain = ok(run_experiment(ExperimentConfig { strategy: Strategy::Uniform, ..base }))?;
    ensure!(wrapped.epochs.iter().all(|e| e.n_clusters == 0 && e.alps.is_empty()), "clustering was used");
    ensure!(metrics_csv(&wrapped) == metrics_csv(&plain), "gated run differs from uniform sampling");
    Ok(())
}

pub fn performance_record_count() -> Check {
    let cfg = ExperimentConfig {
        n_epochs: 100,
        goals_per_epoch: 10,
        start_exploration: 50,
        episode_length: 10,
        refit_every: 10,
        ..small_config()
    };
    let r = ok(run_experiment(cfg))?;
    ensure!(r.performance_records == 1000, "{} records", r.performance_records);
    Ok(())
}

pub fn run_is_reproducible() -> Check {
    let cfg = ExperimentConfig { wrap_grimgep: true, strategy: Strategy::Skewfit, alpha: -0.25, ..small_config() };
    let a = metrics_csv(&ok(run_experiment(cfg.clone()))?);
    let b = metrics_csv(&ok(run_experiment(cfg))?);
    ensure!(a == b, "metrics differ between identical runs");
    Ok(())
}

pub fn categorize_examples() -> Check {
    ensure!(categorize_goal(&in_room(Room::Object, false)) == GoalCategory::ObjectRoom, "object room");
    ensure!(categorize_goal(&in_room(Room::Tv, true)) == GoalCategory::TvOn, "tv on");
    let r = ok(run_experiment(small_config()))?;
    for e in &r.epochs {
        ensure!(close(e.goal_fractions.iter().sum::<f64>(), 1.0, 1e-9), "fractions sum to {:?}", e.goal_fractions);
    }
    Ok(())
}

pub fn welch_examples() -> Check {
    let a = [0.3, 0.9, 1.4, 2.2];
    let same = ok(welch_t_test(&a, &a))?;
    ensure!(same.t == 0.0 && same.p == 1.0, "identical samples {same:?}");
    let w = ok(welch_t_test(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]))?;
    let (t, df) = welch(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]);
    let p = t_two_sided_p(t, df);
    ensure!(close(w.t, t, 1e-12) && close(w.df, df, 1e-9), "t {} df {} vs {t} {df}", w.t, w.df);
    ensure!(close(w.t, -3.674, 5e-4), "t = {}", w.t);
    ensure!(close(w.p, p, 1e-6), "p {} vs oracle {p}", w.p);
    ensure!(close(w.p, 0.0214, 5e-4), "p = {}", w.p);
    let b = [1.1, 0.2, 2.9, 1.7, 0.4];
    let (ab, ba) = (ok(welch_t_test(&a, &b))?, ok(welch_t_test(&b, &a))?);
    ensure!(ab.t == -ba.t && ab.p == ba.p, "swap changed the test: {ab:?} {ba:?}");
    Ok(())
}

pub fn smooth_examples() -> Check {
    let s = [0.3, 1.2, -0.7, 4.0];
    ensure!(ok(smooth(&s, 1))? == s, "window 1 is not the identity");
    ensure!(ok(smooth(&[0.1; 7], 3))? == [0.1; 7], "constant series changed");
    ensure!(ok(smooth(&[0.0, 0.0, 1.0, 1.0], 2))? == [0.0, 0.0, 0.5, 1.0], "[0,0,1,1] window 2");
    Ok(())
}

fn synthetic_run(seed: u64, successes: &[f64]) -> RunResult {
    let config = ExperimentConfig { seed, ..ExperimentConfig::default() };
    RunResult {
        fingerprint: config.fingerprint(),
        config,
        epochs: successes
            .iter()
            .enumerate()
            .map(|(i, &s)| EpochMetrics {
                epoch: i + 1,
                mean_success: s,
                mean_f1: 1.0,
                goal_fractions: [0.25; 4],
                cumulative_fractions: [0.25; 4],
                n_clusters: 0,
                alps: vec![],
            })
            .collect(),
        performance_records: 0,
        wall_seconds: 0.0,
    }
}

pub fn aggregate_examples() -> Check {
    let one = ok(aggregate_seeds(&[synthetic_run(0, &[0.1, 0.5])]))?;
    ensure!(one.rows.iter().all(|r| r.metrics.iter().all(|m| m.std == 0.0)), "singleton std");
    ensure!(one.rows[1].metrics[0].mean == 0.5, "singleton mean");
    let two = ok(aggregate_seeds(&[synthetic_run(0, &[0.0, 0.2]), synthetic_run(1, &[0.0, 0.4])]))?;
    let fin = &two.final_row().unwrap().metrics[0];
    ensure!(close(fin.mean, 0.3, 1e-12) && close(fin.std, 0.1414, 1e-4), "final {fin:?}");
    ensure!(two.rows.iter().map(|r| r.epoch).collect::<Vec<_>>() == [1, 2], "epochs do not align");
    let mut other = synthetic_run(2, &[0.0, 0.1]);
    other.config.alpha = -0.5;
    other.fingerprint = other.config.fingerprint();
    ensure!(aggregate_seeds(&[synthetic_run(0, &[0.0, 0.2]), other]).is_err(), "mixed fingerprints accepted");
    Ok(())
}

// ---------------------------------------------------------------- published constants

pub fn published_constants() -> Check {
    let cfg = ExperimentConfig::default();
    ensure!(Env::default().build_test_set().len() == 25, "test set size");
    ensure!(cfg.temperature == 5.0 && cfg.history_length == 50, "bandit temperature / history length");
    ensure!(cfg.episode_length == 50, "episode length");
    ensure!(cfg.env.tv_resample_prob == 0.1, "distractor rate");
    ensure!(cfg.candidate_ks == [1, 3, 5, 7, 9, 11, 13, 15, 17, 19], "candidate ks");
    ensure!(grimgep::env::SUCCESS_TOLERANCE == 0.2, "success tolerance");
    ensure!(grimgep::grimgep::prior::UNIFORM_SHARE == 0.2, "bandit uniform share");
    for alpha in [-0.25, -0.75] {
        let mut c = cfg.clone();
        ensure!(c.set(&format!("alpha={alpha}")).is_ok(), "preset alpha {alpha} rejected");
    }
    Ok(())
}

pub type Example = (&'static str, fn() -> Check);

pub const ALL: &[Example] = &[
    ("reset_initial_condition", reset_initial_condition),
    ("reset_is_deterministic", reset_is_deterministic),
    ("open_move_far_away_is_plain_motion", open_move_far_away_is_plain_motion),
    ("closing_on_object_grabs", closing_on_object_grabs),
    ("distractor_resample_rate", distractor_resample_rate),
    ("render_is_pure", render_is_pure),
    ("tv_pattern_keyed_by_seed", tv_pattern_keyed_by_seed),
    ("test_set_shape", test_set_shape),
    ("success_thresholds", success_thresholds),
    ("visible_entity_sets", visible_entity_sets),
    ("f1_examples", f1_examples),
    ("pca_rank_one", pca_rank_one),
    ("pca_orthonormal", pca_orthonormal),
    ("pca_matches_covariance_eigenvalues", pca_matches_covariance_eigenvalues),
    ("embed_mean_is_zero", embed_mean_is_zero),
    ("embed_is_affine_and_contracting", embed_is_affine_and_contracting),
    ("reward_examples", reward_examples),
    ("density_support_cap", density_support_cap),
    ("density_kernel_peak_and_symmetry", density_kernel_peak_and_symmetry),
    ("density_matches_kernel_sum", density_matches_kernel_sum),
    ("count_key_extremes", count_key_extremes),
    ("count_key_matches_pool_oracle", count_key_matches_pool_oracle),
    ("count_weight_examples", count_weight_examples),
    ("skew_weight_examples", skew_weight_examples),
    ("goal_distribution_examples", goal_distribution_examples),
    ("skewfit_distribution_matches_oracle", skewfit_distribution_matches_oracle),
    ("sampling_examples", sampling_examples),
    ("gmm_two_clouds", gmm_two_clouds),
    ("gmm_single_component_closed_form", gmm_single_component_closed_form),
    ("gmm_em_monotone_example", gmm_em_monotone_example),
    ("aic_prefers_one_component_for_one_cloud", aic_prefers_one_component_for_one_cloud),
    ("aic_argmin_and_singleton", aic_argmin_and_singleton),
    ("assignment_at_dominant_mean", assignment_at_dominant_mean),
    ("assignment_matches_centroid_oracle", assignment_matches_centroid_oracle),
    ("performances_average_per_epoch", performances_average_per_epoch),
    ("performances_truncate_to_length", performances_truncate_to_length),
    ("alp_examples", alp_examples),
    ("bandit_examples", bandit_examples),
    ("prior_examples", prior_examples),
    ("combine_examples", combine_examples),
    ("record_grows_by_visited_states", record_grows_by_visited_states),
    ("recording_twice_doubles_counts", recording_twice_doubles_counts),
    ("eviction_is_fifo", eviction_is_fifo),
    ("replay_reaches_anchor_exactly", replay_reaches_anchor_exactly),
    ("reach_length_contract", reach_length_contract),
    ("reach_from_initial_state_only", reach_from_initial_state_only),
    ("random_rollout_contracts", random_rollout_contracts),
    ("gating_keeps_sampling_uniform", gating_keeps_sampling_uniform),
    ("performance_record_count", performance_record_count),
    ("run_is_reproducible", run_is_reproducible),
    ("categorize_examples", categorize_examples),
    ("welch_examples", welch_examples),
    ("smooth_examples", smooth_examples),
    ("aggregate_examples", aggregate_examples),
    ("published_constants", published_constants),
];

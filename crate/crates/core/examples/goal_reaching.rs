//! Stores random rollouts in the replay buffer and reaches stored goals by
//! replaying the closest anchor in latent space.

use grimgep::env::{evaluate_success, Env, EnvConfig};
use grimgep::image::Image;
use grimgep::learner::{random_rollout, reach, Anchors, ReplayBuffer, TailPolicy};
use grimgep::representation::fit_pca;
use grimgep::rng::{stream, Stream};

fn main() -> grimgep::Result<()> {
    let env = Env::new(EnvConfig { tv_enabled: false, ..EnvConfig::default() });
    let mut buffer = ReplayBuffer::new(env.clone(), 100_000);
    for seed in 0..40 {
        let t = random_rollout(&env, seed, 50, &mut stream(seed, Stream::Env), &mut stream(seed, Stream::Policy));
        buffer.record_rollout(&t)?;
    }
    let images: Vec<Image> = (0..buffer.len()).map(|i| buffer.image(i)).collect();
    buffer.set_reward_model(fit_pca(&images, 8)?)?;
    println!("{} states from {} distinct observations", buffer.len(), buffer.n_distinct_observations());

    let (mut env_rng, mut policy_rng) = (stream(1, Stream::Env), stream(1, Stream::Policy));
    for goal in (30..buffer.len()).step_by(397) {
        let latent = buffer.latent(goal).unwrap().to_vec();
        let t = reach(&buffer, Anchors::All, &latent, &env, 50, TailPolicy::Hold, &mut env_rng, &mut policy_rng)?;
        println!(
            "goal {goal:>4}: wanted gripper {:?}, reached {:?}, exact: {}",
            buffer.state(goal).gripper,
            t.last_state().gripper,
            t.last_state() == buffer.state(goal)
        );
    }

    let test_set = env.build_test_set();
    let pca = buffer.reward_model().unwrap().clone();
    let mut solved = 0;
    for goal in &test_set {
        let latent = pca.embed(&goal.image)?;
        let t = reach(&buffer, Anchors::All, &latent, &env, 50, TailPolicy::Hold, &mut env_rng, &mut policy_rng)?;
        solved += evaluate_success(goal, t.last_state()) as usize;
    }
    println!("random exploration solves {solved}/{} test goals", test_set.len());
    Ok(())
}

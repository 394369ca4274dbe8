//! Compares uniform, count-based and density-skewed goal distributions over
//! the same replay buffer, grouped by the room each goal lies in.

use grimgep::env::{Env, Room};
use grimgep::image::Image;
use grimgep::learner::{random_rollout, ReplayBuffer};
use grimgep::novelty::{goal_distribution, Strategy};
use grimgep::representation::{fit_density, fit_pca};
use grimgep::rng::{stream, Stream};

fn main() -> grimgep::Result<()> {
    let env = Env::default();
    let mut buffer = ReplayBuffer::new(env.clone(), 100_000);
    for seed in 0..60 {
        let t = random_rollout(&env, seed, 50, &mut stream(seed, Stream::Env), &mut stream(seed, Stream::Policy));
        buffer.record_rollout(&t)?;
    }
    let images: Vec<Image> = (0..buffer.len()).map(|i| buffer.image(i)).collect();
    buffer.set_reward_model(fit_pca(&images, 8)?)?;
    let latents: Vec<Vec<f64>> = (0..buffer.len()).map(|i| buffer.latent(i).unwrap().to_vec()).collect();
    buffer.set_density(fit_density(&latents, 1.0, 1024, &mut stream(0, Stream::Refit))?)?;

    println!("{} states, {} distinct count keys", buffer.len(), buffer.count_table().n_keys());
    println!("{:<12} {:>8} {:>8} {:>8} {:>8}", "strategy", "start", "object", "tv off", "tv on");
    for (strategy, alpha) in [(Strategy::Uniform, 0.0), (Strategy::CountBased, -1.0), (Strategy::Skewfit, -0.25)] {
        let dist = goal_distribution(&buffer, strategy, alpha)?;
        let mut mass = [0.0; 4];
        for (i, p) in dist.probs().iter().enumerate() {
            let s = buffer.state(i);
            let slot = match (s.room, s.tv_on) {
                (Room::Start, _) => 0,
                (Room::Object, _) => 1,
                (Room::Tv, false) => 2,
                (Room::Tv, true) => 3,
            };
            mass[slot] += p;
        }
        println!("{:<12} {:>8.3} {:>8.3} {:>8.3} {:>8.3}", format!("{strategy:?}"), mass[0], mass[1], mass[2], mass[3]);
    }
    Ok(())
}

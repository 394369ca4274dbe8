//! Fits the PCA image embedding on random rollouts, shows explained variance,
//! latent rewards and the kernel density used for skewing.

use grimgep::env::Env;
use grimgep::image::Image;
use grimgep::learner::random_rollout;
use grimgep::representation::{fit_density, fit_pca, reward};
use grimgep::rng::{stream, Stream};

fn main() -> grimgep::Result<()> {
    let env = Env::default();
    let mut images: Vec<Image> = Vec::new();
    for seed in 0..20 {
        let t = random_rollout(&env, seed, 50, &mut stream(seed, Stream::Env), &mut stream(seed, Stream::Policy));
        images.extend(t.states.iter().map(|s| env.render(s)));
    }
    let pca = fit_pca(&images, 8)?;
    let total: f64 = pca.explained_variance().iter().sum();
    println!("{} images, {} latent dims", images.len(), pca.latent_dim());
    for (k, v) in pca.explained_variance().iter().enumerate() {
        println!("  component {k}: variance {v:.4} ({:.1}% of the kept total)", 100.0 * v / total);
    }

    let latents: Vec<Vec<f64>> = images.iter().map(|img| pca.embed(img)).collect::<grimgep::Result<_>>()?;
    let first = &latents[0];
    for i in [1, 10, 100, 500] {
        println!("reward of state {i} towards state 0: {:.4}", reward(first, &latents[i])?);
    }

    let density = fit_density(&latents, 1.0, 512, &mut stream(0, Stream::Refit))?;
    let mut scored: Vec<(f64, usize)> =
        latents.iter().enumerate().map(|(i, z)| Ok((density.log_density(z)?, i))).collect::<grimgep::Result<_>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    println!("rarest state {} (log density {:.2}), most common {} ({:.2})",
        scored[0].1, scored[0].0, scored[scored.len() - 1].1, scored[scored.len() - 1].0);
    Ok(())
}

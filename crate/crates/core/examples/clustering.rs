//! Fits Gaussian mixtures to three synthetic clouds, selects the number of
//! components by AIC and prints the EM log-likelihood trace.

use grimgep::grimgep::{fit_gmm_with, select_gmm_by_aic, EmOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> grimgep::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let centers = [[-4.0, 0.0], [4.0, 0.0], [0.0, 5.0]];
    let data: Vec<Vec<f64>> = (0..600)
        .map(|i| {
            let c = centers[i % 3];
            // A sum of uniforms is close to Gaussian with unit variance.
            let mut noise = || (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0;
            vec![c[0] + noise(), c[1] + noise()]
        })
        .collect();

    let (model, trace) = fit_gmm_with(&data, 3, &EmOptions::default(), &mut rng)?;
    println!("EM with k=3 ran {} iterations", model.n_iter());
    for (i, ll) in trace.iter().enumerate().take(8) {
        println!("  iteration {i}: log-likelihood {ll:.3}");
    }

    let best = select_gmm_by_aic(&data, &[1, 2, 3, 4, 5, 6], &mut rng)?;
    println!("AIC picks k={} (AIC {:.1})", best.k(), best.aic());
    for c in 0..best.k() {
        println!("  component {c}: weight {:.3} mean {:?}", best.weights()[c], best.mean(c));
    }
    for c in centers {
        println!("  {:?} is assigned to component {}", c, best.assign(&c));
    }
    Ok(())
}

//! Turns per-cluster performance histories into absolute learning progress,
//! bandit probabilities and a masked goal distribution.

use grimgep::grimgep::{build_prior, cluster_probabilities, combine, estimate_alp, MaskedSampler};
use grimgep::novelty::GoalDistribution;

fn main() -> grimgep::Result<()> {
    let histories = [
        ("improving", vec![0.1, 0.1, 0.2, 0.2, 0.4, 0.5, 0.6, 0.7]),
        ("forgetting", vec![0.8, 0.8, 0.7, 0.6, 0.4, 0.3, 0.3, 0.2]),
        ("mastered", vec![0.9; 8]),
        ("noisy tv", vec![0.0; 8]),
    ];
    let alps: Vec<f64> = histories.iter().map(|(_, h)| estimate_alp(h)).collect();
    let probs = cluster_probabilities(&alps, 5.0);
    for ((name, _), (alp, p)) in histories.iter().zip(alps.iter().zip(&probs)) {
        println!("{name:<11} ALP {alp:.3} -> drawn with probability {p:.3}");
    }

    // Eight goals spread over the four clusters, weighted by a novelty score.
    let assignments = [0, 0, 1, 1, 2, 2, 3, 3];
    let novelty = GoalDistribution::from_weights(vec![1.0, 3.0, 2.0, 2.0, 1.0, 1.0, 5.0, 5.0])?;
    let prior = build_prior(0, &assignments)?;
    let masked = combine(&prior, &novelty)?;
    println!("goals of cluster 0 after masking: {:?}", masked.probs());

    let sampler = MaskedSampler::new(&assignments, &novelty, 4)?;
    for c in 0..4 {
        println!("cluster {c} holds {:.3} of the novelty mass", sampler.mass(c)?);
    }
    Ok(())
}

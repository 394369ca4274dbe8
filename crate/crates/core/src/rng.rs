//! Per-component random streams derived from one master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent consumers of randomness inside a run. Each gets its own
/// ChaCha stream so that changing how often one component draws never
/// shifts the values another component sees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Env = 1,
    Policy = 2,
    Goals = 3,
    Bandit = 4,
    EmInit = 5,
    Refit = 6,
    Memory = 7,
    Eval = 8,
}

pub fn stream(seed: u64, which: Stream) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

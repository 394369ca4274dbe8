//! Learning-progress guided goal exploration on a small pixel playground.
//!
//! The crate bundles a three-room 2D environment with a noisy TV, a PCA
//! latent space with a kernel density, count-based and density-skewed goal
//! samplers, the cluster/learning-progress wrapper that masks them, a
//! trajectory-replay goal reacher and a multi-seed experiment harness.

pub mod env;
pub mod error;
pub mod grimgep;
pub mod harness;
pub mod image;
pub mod learner;
pub mod novelty;
pub mod representation;
pub mod rng;

pub use error::{Error, Result};

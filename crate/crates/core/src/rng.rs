//! Seeded random streams.
//!
//! Every stochastic component draws from a ChaCha8 generator so runs are
//! reproducible across platforms and crate versions. Independent consumers
//! (rollouts, critic, evaluation) use distinct streams of the same seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub mod stream {
    pub const ROLLOUT: u64 = 1;
    pub const CRITIC: u64 = 2;
    pub const EVALUATION: u64 = 3;
    pub const FINAL_EVALUATION: u64 = 4;
}

/// Generator for `seed` positioned on `stream`.
pub fn seeded(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for the post-training evaluation of a run trained with `seed`,
/// kept apart from every stream used during training.
pub fn final_evaluation_seed(seed: u64) -> u64 {
    use rand::RngCore;
    seeded(seed, stream::FINAL_EVALUATION).next_u64()
}

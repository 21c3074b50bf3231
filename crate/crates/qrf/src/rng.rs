//! Seeded, splittable randomness.
//!
//! Every stochastic routine takes an explicit `u64` seed. Independent trials
//! draw from separate ChaCha streams of the same key, so batches can be
//! evaluated in any order (or in parallel) with identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for stream `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

//! Seeded random streams.
//!
//! Every simulation draws from ChaCha8. A run is identified by a 64-bit seed;
//! independent trajectories of the same run use distinct ChaCha streams
//! (`stream = trajectory index`), so results do not depend on how
//! trajectories are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Generator for trajectory `index` of the run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

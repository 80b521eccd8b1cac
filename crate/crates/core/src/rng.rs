//! Deterministic, splittable random streams.
//!
//! A stream is identified by `(seed, index)`. Monte Carlo loops derive one
//! child stream per sample through [`RandomStream::substream`], so results
//! do not depend on how samples are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 20240801;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    pub seed: u64,
    pub index: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl RandomStream {
    pub fn new(seed: u64, index: u64) -> Self {
        RandomStream { seed, index }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    /// Generator for this stream. Identical `(seed, index)` pairs yield
    /// identical sequences.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        rng
    }

    /// Child stream `i` of this stream. Children of distinct parents are
    /// keyed by a mixed seed so they do not collide with each other.
    pub fn substream(&self, i: u64) -> RandomStream {
        RandomStream {
            seed: splitmix64(self.seed ^ splitmix64(self.index.wrapping_add(0x5851_F42D_4C95_7F2D))),
            index: i,
        }
    }
}

impl Default for RandomStream {
    fn default() -> Self {
        Self::from_seed(DEFAULT_SEED)
    }
}

//! Seeded random streams.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). A `u64`
//! seed is expanded to the 256-bit key by `SeedableRng::seed_from_u64`, and
//! independent substreams of one key are selected with the 64-bit ChaCha
//! stream id. Both steps are fixed algorithms, so outputs are identical on
//! every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Hands out substreams of one seed.
#[derive(Clone, Debug)]
pub struct StreamFactory {
    base: ChaCha8Rng,
}

impl StreamFactory {
    pub fn new(seed: u64) -> Self {
        StreamFactory {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn stream(&self, id: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(id);
        rng
    }
}

/// Substream `id` of `seed`.
pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    StreamFactory::new(seed).stream(id)
}

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold `parts` into `base`: `h = splitmix64(base)`, then
/// `h = splitmix64(h ^ part)` for each part in order.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |h, &p| splitmix64(h ^ p))
}

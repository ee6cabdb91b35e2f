//! Seed derivation for reproducible, order-independent random substreams.
//!
//! A trial seed is obtained by folding indices into a base seed with the
//! SplitMix64 finalizer. Each seed drives ChaCha8 generators whose 64-bit
//! stream id encodes the role (noise, transmitter k, timing offsets, ...),
//! so substreams never overlap and no draw depends on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold `path` into `base`, one index at a time.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(base), |h, &i| mix64(h ^ i))
}

/// What a substream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    Noise,
    Transmitter(usize),
    SyncError,
    Perturbation,
}

impl StreamRole {
    fn id(self) -> u64 {
        match self {
            StreamRole::Noise => 0,
            StreamRole::Transmitter(k) => 1 + k as u64,
            StreamRole::SyncError => u64::MAX - 1,
            StreamRole::Perturbation => u64::MAX - 2,
        }
    }
}

pub fn substream(seed: u64, role: StreamRole) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(role.id());
    rng
}

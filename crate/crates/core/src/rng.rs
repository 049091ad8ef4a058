//! Seed derivation. Every random stream in the crate is a ChaCha8 generator
//! seeded from `(root seed, tag, index)`, so results never depend on thread
//! scheduling or on how many streams were drawn before.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream tags. Keep these stable: changing one changes every derived result.
pub mod tag {
    pub const GEN: u64 = 0x67656e;
    pub const RUN: u64 = 0x72756e;
    pub const RESTART: u64 = 0x727374;
    pub const TRIAL: u64 = 0x74726c;
    pub const INSTANCE: u64 = 0x696e73;
    pub const COLOR: u64 = 0x636f6c;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for stream `index` under `tag`.
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(tag)) ^ index)
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

//! Seeded random streams.
//!
//! Every stochastic component draws from its own ChaCha stream derived from
//! the run seed and a component tag, so adding a consumer never shifts the
//! numbers another consumer sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags. Values are part of the reproducibility contract.
pub mod stream {
    pub const INIT: u64 = 1;
    pub const CLIENT_SHUFFLE: u64 = 2;
    pub const PARTITION: u64 = 3;
    pub const NULL_GRAPHS: u64 = 4;
    pub const PAIR_SAMPLING: u64 = 5;
    pub const AWE_SAMPLING: u64 = 6;
    pub const SYNTHETIC: u64 = 7;
    pub const SGC: u64 = 8;
}

/// SplitMix64 finalizer, used to decorrelate derived seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, stream: u64, index: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(seed ^ mix(stream)) ^ index))
}

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

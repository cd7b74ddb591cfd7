//! Counter-based random streams.
//!
//! Every stochastic routine takes an explicit stream. Streams are ChaCha8
//! generators keyed by `(seed, key)`, so any position of a run (iteration
//! `t`, slot `s`, scenario `j`, ...) can be reproduced without replaying the
//! draws that came before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Stream slots used by the optimizers within one iteration.
pub mod slot {
    pub const GRADIENT: u64 = 0;
    pub const INVERSE_A: u64 = 1;
    pub const INVERSE_B: u64 = 2;
    pub const EVALUATION: u64 = 0xE7A1;
    pub const OUTPUT: u64 = 0x0u64.wrapping_sub(2);
    pub const FROZEN: u64 = 0x0u64.wrapping_sub(3);
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a key path into a single 64-bit stream id.
pub fn mix_key(key: &[u64]) -> u64 {
    key.iter().fold(0x5EED_0F_57EA_u64, |acc, &k| {
        splitmix64(acc ^ splitmix64(k))
    })
}

/// Derives a child seed from a parent seed and a key path.
pub fn derive_seed(seed: u64, key: &[u64]) -> u64 {
    splitmix64(seed ^ mix_key(key).rotate_left(17))
}

/// Opens the stream addressed by `(seed, key)`.
pub fn stream(seed: u64, key: &[u64]) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(mix_key(key));
    rng
}

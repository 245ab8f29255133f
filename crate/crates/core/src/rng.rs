//! Seed derivation and the pinned PRNG.
//!
//! Every random draw in the crate goes through [`TrialRng`], which is
//! `rand_chacha::ChaCha8Rng` (rand_chacha 0.3) seeded with
//! `SeedableRng::seed_from_u64`. Sub-seeds are derived with the SplitMix64
//! finalizer so they are stable across platforms and compiler versions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Algorithm name recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng/rand_chacha-0.3;splitmix64-derive";

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `seed` one word at a time: `h = splitmix64(h ^ part)`.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(seed), |h, &p| splitmix64(h ^ p))
}

/// Per-trial seed: `derive_seed(master, [n, q, trial])`.
pub fn trial_seed(master: u64, n: usize, q: usize, trial: usize) -> u64 {
    derive_seed(master, &[n as u64, q as u64, trial as u64])
}

/// Stream tags used to split a trial seed into independent generators.
pub mod stream {
    pub const SCHEDULE: u64 = 0x5343_4845_4455_4c45;
    pub const COLORING: u64 = 0x434f_4c4f_5249_4e47;
    pub const POOLS: u64 = 0x504f_4f4c_5300_0000;
}

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_for(seed: u64, stream: u64) -> TrialRng {
    rng_from_seed(derive_seed(seed, &[stream]))
}

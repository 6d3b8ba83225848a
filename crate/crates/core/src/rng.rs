//! Seed-derived random streams.
//!
//! A stream is identified by a master seed and a tag path such as
//! `[TAG_TRIAL, run, group, trial]`. Two streams with different tag paths are
//! statistically independent, and a given path always yields the same
//! sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const TAG_LAYOUT: u64 = 1;
pub const TAG_PROVER: u64 = 2;
pub const TAG_TRIAL: u64 = 3;
pub const TAG_RUN: u64 = 4;
pub const TAG_MONTE_CARLO: u64 = 5;
pub const TAG_ENTANGLED: u64 = 6;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a tag path into a single 64-bit value.
pub fn mix(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix(seed), |acc, &t| splitmix(acc ^ splitmix(t)))
}

/// Independent generator for `(seed, tags)`.
pub fn stream(seed: u64, tags: &[u64]) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(mix(seed, tags));
    rng
}

/// Seed of the `run`-th repetition of an experiment seeded with `seed`.
pub fn run_seed(seed: u64, run: u64) -> u64 {
    mix(seed, &[TAG_RUN, run])
}

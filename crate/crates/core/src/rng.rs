//! Seeded random streams.
//!
//! Every random draw in the crate goes through a [`ChaCha8Rng`] derived from a
//! `(seed, stream)` pair, so independent parts of an experiment (codebooks,
//! token sequences, weight matrices) can be reproduced separately.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream identifiers used by the experiment drivers.
pub mod streams {
    pub const WEIGHTS: u64 = 1;
    pub const INPUT_MEMORY: u64 = 2;
    pub const OUTPUT_MEMORY: u64 = 3;
    pub const TRAIN_DATA: u64 = 4;
    pub const TEST_DATA: u64 = 5;
    pub const CONTROL: u64 = 6;
    pub const ENCODING: u64 = 7;
    pub const NOISE: u64 = 8;
}

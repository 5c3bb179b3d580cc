//! Seed expansion into independent named random streams.
//!
//! Every consumer of randomness asks for a stream by purpose and an index
//! (a block, a sweep, an item). Streams are derived by hashing, so adding a
//! new consumer never shifts the numbers drawn by an existing one, and work
//! split across threads draws the same numbers whatever the schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Purpose of a random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Assignment = 1,
    Labels = 2,
    Weights = 3,
    References = 4,
    PowerStarts = 5,
    Ties = 6,
}

/// A global seed from which all streams are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct SampleSeed(pub u64);

impl SampleSeed {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    /// Raw 64-bit key for `(stream, index)`.
    pub fn key(self, stream: Stream, index: u64) -> u64 {
        let mut h = splitmix64(self.0 ^ 0x6c73_626d_5f73_6565);
        h = splitmix64(h ^ (stream as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        splitmix64(h ^ index)
    }

    pub fn rng(self, stream: Stream, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.key(stream, index))
    }

    /// A uniform draw in [0, 1) keyed by `(stream, index)` without building a generator.
    pub fn unit(self, stream: Stream, index: u64) -> f64 {
        (self.key(stream, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

//! Deterministic random streams.
//!
//! Every random quantity in a simulation is drawn from a [`Stream`] addressed
//! by a path of integer keys, e.g. `(master_seed, realization, SERVING_FADING)`.
//! The seed of a stream depends only on its path, so results do not depend on
//! how realizations are scheduled across workers.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Generator handed out by [`Stream::rng`].
pub type StreamRng = Xoshiro256PlusPlus;

/// Substream tags used by the samplers and the Monte Carlo kernel.
pub mod tags {
    pub const RADII: u64 = 1;
    pub const ANGLES: u64 = 2;
    pub const TIER_MARKS: u64 = 3;
    pub const LATTICE_OFFSET: u64 = 4;
    pub const DEPLOYMENT: u64 = 5;
    pub const SERVING_FADING: u64 = 6;
    pub const INTERFERER_FADING: u64 = 7;
    pub const ATTEMPT: u64 = 8;
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A named position in the tree of random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Stream {
    key: u64,
}

impl Stream {
    /// Root stream of an experiment.
    pub fn root(master_seed: u64) -> Self {
        Stream {
            key: mix64(master_seed.wrapping_add(GOLDEN_GAMMA)),
        }
    }

    /// Child stream `index` of this stream. Distinct indices give
    /// statistically independent streams.
    pub fn child(self, index: u64) -> Self {
        Stream {
            key: mix64(self.key ^ mix64(index.wrapping_mul(GOLDEN_GAMMA).wrapping_add(GOLDEN_GAMMA))),
        }
    }

    /// Shorthand for `self.child(a).child(b)`.
    pub fn path(self, keys: &[u64]) -> Self {
        keys.iter().fold(self, |s, &k| s.child(k))
    }

    pub fn key(self) -> u64 {
        self.key
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(self) -> StreamRng {
        StreamRng::seed_from_u64(self.key)
    }
}

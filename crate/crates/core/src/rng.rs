//! Counter-based random sub-streams.
//!
//! Every random quantity in a run is drawn from its own ChaCha stream whose
//! seed is a hash of the master seed, a purpose tag and up to three indices.
//! Streams never share state, so results do not depend on evaluation order
//! or thread count, and growing one population (users, say) leaves the
//! draws of every other entity untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Purpose tags keep streams for different quantities disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    UserPlacement = 1,
    EvePlacement = 2,
    Fading = 3,
    Tasks = 4,
    Association = 5,
    Scheduler = 6,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the seed of one sub-stream.
pub fn derive_seed(master: u64, tag: Stream, a: u64, b: u64, c: u64) -> u64 {
    let mut h = splitmix64(master);
    for word in [tag as u64, a, b, c] {
        h = splitmix64(h ^ word);
    }
    h
}

pub fn stream(master: u64, tag: Stream, a: u64, b: u64, c: u64) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, tag, a, b, c))
}

//! Random stream discipline.
//!
//! Every stream is a `ChaCha8Rng` (from `rand_chacha`), which produces the same
//! output on every platform. Deployment uses the run seed directly; the
//! election stream of a run is seeded with [`stream_seed`]`(seed, protocol tag)`
//! so that adding or removing a protocol never perturbs the others.

use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// 64-bit FNV-1a over the bytes of `tag`.
pub fn fnv1a64(tag: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    tag.bytes().fold(OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(PRIME))
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `splitmix64(seed ^ fnv1a64(tag))`.
pub fn stream_seed(seed: u64, tag: &str) -> u64 {
    splitmix64(seed ^ fnv1a64(tag))
}

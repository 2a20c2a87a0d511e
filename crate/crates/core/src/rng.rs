//! Seeded random streams.
//!
//! Every stream is a ChaCha12 generator keyed by a master seed and selected by
//! a 64-bit stream index. Streams never overlap, and the draws of stream `i`
//! depend only on `(seed, i)`, so trials can run on any thread in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Generator type handed to samplers and shuffles.
pub type StreamRng = ChaCha12Rng;

/// Opens stream `index` of the generator keyed by `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from an ordered list of words.
///
/// The mapping is fixed (SplitMix64 folding), so derived seeds are stable
/// across platforms and compiler versions.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6a09_e667_f3bc_c908, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

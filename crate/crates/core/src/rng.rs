//! Deterministic, counter-based random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream selected by a
//! `(seed, stream)` pair. Bulk draws are split into fixed-size chunks that
//! seek directly to their word offset, so results do not depend on the
//! number of worker threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CHUNK: usize = 4096;

/// SplitMix64 finaliser.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives an independent child seed from `seed` and a tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    mix64(seed ^ mix64(tag.wrapping_add(0x632B_E59B_D9B4_E019)))
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `len` uniformly random words from stream `(seed, stream)`.
pub fn random_words(seed: u64, stream: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(chunk, slot)| {
        let mut rng = stream_rng(seed, stream);
        // Two 32-bit words per u64.
        rng.set_word_pos((chunk * CHUNK * 2) as u128);
        for v in slot.iter_mut() {
            *v = rng.next_u64();
        }
    });
    out
}

/// Maps a uniform word onto `[0, range)` by multiply-shift.
#[inline]
pub fn below(word: u64, range: u64) -> u64 {
    ((word as u128 * range as u128) >> 64) as u64
}

/// Bernoulli threshold: `word < threshold(p)` holds with probability `p`.
pub fn bernoulli_threshold(p: f64) -> u64 {
    if p >= 1.0 {
        u64::MAX
    } else if p <= 0.0 {
        0
    } else {
        (p * 18_446_744_073_709_551_616.0) as u64
    }
}

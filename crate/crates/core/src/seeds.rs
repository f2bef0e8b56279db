//! Seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator. Sub-seeds are
//! derived with the SplitMix64 finalizer so that streams for different
//! purposes never share state, and Monte-Carlo frames are addressed by
//! `(master seed, SNR index, frame index)` through the ChaCha stream id.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 output function.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic sub-seed of `seed` for the purpose tagged `tag`.
pub fn derive(seed: u64, tag: u64) -> u64 {
    mix64(mix64(seed) ^ tag.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest frame index addressable by [`frame_rng`].
pub const MAX_FRAMES: u64 = 1 << 40;

/// Random stream of one Monte-Carlo frame.
pub fn frame_rng(master: u64, snr_index: usize, frame: u64) -> ChaCha8Rng {
    assert!(frame < MAX_FRAMES, "frame index out of range");
    let mut r = ChaCha8Rng::seed_from_u64(master);
    r.set_stream(((snr_index as u64) << 40) | frame);
    r
}

/// Per-frame nonce used to re-seed decoder-internal randomness.
pub fn frame_nonce(master: u64, snr_index: usize, frame: u64) -> u64 {
    derive(derive(master, snr_index as u64), frame)
}

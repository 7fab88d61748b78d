//! Seeded, label-keyed random substreams.
//!
//! All randomness flows through named substreams keyed by (seed, labels...),
//! so parallel or reordered callers cannot perturb each other's draws.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

const MIX_CONST: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(MIX_CONST);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes arbitrary bytes into a 64-bit accumulator.
fn absorb(state: &mut u64, bytes: &[u8]) {
    for chunk in bytes.chunks(8) {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        *state ^= u64::from_le_bytes(word);
        splitmix64(state);
    }
    // length suffix so ("ab","c") and ("a","bc") diverge
    *state ^= bytes.len() as u64;
    splitmix64(state);
}

/// Derives a keyed 64-bit value from (seed, labels...). Used both for RNG
/// substream seeding and for the lazy k-set coloring PRF.
pub fn keyed_hash(seed: u64, labels: &[&str]) -> u64 {
    let mut state = seed ^ MIX_CONST;
    splitmix64(&mut state);
    for label in labels {
        absorb(&mut state, label.as_bytes());
    }
    splitmix64(&mut state)
}

/// Keyed hash over raw words, for PRFs over bit-vector keys.
pub fn keyed_hash_words(seed: u64, words: impl IntoIterator<Item = u64>) -> u64 {
    let mut state = seed ^ MIX_CONST;
    splitmix64(&mut state);
    for w in words {
        state ^= w;
        splitmix64(&mut state);
    }
    splitmix64(&mut state)
}

/// A deterministic RNG stream for the given label path. Identical paths give
/// identical streams; distinct paths give statistically independent streams.
pub fn seed_substream(seed: u64, labels: &[&str]) -> ChaCha12Rng {
    let mut state = keyed_hash(seed, labels);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

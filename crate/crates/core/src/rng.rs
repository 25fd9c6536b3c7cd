//! Deterministic random-stream derivation.
//!
//! Every randomized operation derives its own ChaCha stream from a master
//! seed and a short tag path (domain, generation, offspring index, ...).
//! Streams are independent of evaluation order and worker count, so a run is
//! reproducible bit-for-bit under any parallel schedule.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream domains, kept distinct so unrelated operations never share a stream.
pub mod domain {
    pub const NOISE: u64 = 0x01;
    pub const MRW_FIELD: u64 = 0x02;
    pub const MRW_NOISE: u64 = 0x03;
    pub const GA_INIT: u64 = 0x10;
    pub const GA_CROSSOVER: u64 = 0x11;
    pub const GA_MUTATION: u64 = 0x12;
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent ChaCha stream from `master` and a tag path.
pub fn derive_rng(master: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = master ^ 0x6a09_e667_f3bc_c908;
    for &t in tags {
        state ^= splitmix64(&mut state) ^ t.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        splitmix64(&mut state);
    }
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every stochastic step in the crate.
pub type Rng = ChaCha8Rng;

/// Mixes a base seed with a stream path so that independent work units
/// (fold, concept, trial, ...) get uncorrelated but reproducible streams.
pub fn derive_seed(base: u64, stream: &[u64]) -> u64 {
    let mut state = splitmix(base ^ 0x5bd1_e995_9e37_79b9);
    for &s in stream {
        state = splitmix(state ^ splitmix(s.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    state
}

pub fn rng_for(base: u64, stream: &[u64]) -> Rng {
    Rng::seed_from_u64(derive_seed(base, stream))
}

/// Stable 64-bit hash of a string, for turning names into stream ids.
pub fn name_stream(name: &str) -> u64 {
    // FNV-1a; std's hasher is not stable across releases.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

//! Deterministic random-stream derivation for parallel Monte Carlo.
//!
//! Every trial, sweep point, and scheme gets its own counter-derived
//! stream, so results are identical for any degree of parallelism given
//! the same master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mix a master seed with a path of context indices (axis, scheme, trial,
/// ...) into a single derived seed. Same inputs, same output.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &p in path {
        state = splitmix64(state ^ splitmix64(p));
    }
    state
}

/// Derive an independent random stream from a master seed and a context path.
pub fn derive_stream(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}

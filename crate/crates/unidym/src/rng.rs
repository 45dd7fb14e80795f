//! Counter-based random streams.
//!
//! Every randomized sweep draws from `stream(seed, index)` where `index`
//! identifies the sweep (or the parallel lane) — independent streams
//! without sequence coordination, reproducible from the single 64-bit seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Salt separating the harness's key schedule from a bare (seed, index)
/// pair; an arbitrary odd 64-bit constant.
const KEY_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// An independent random stream for sweep `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..24].copy_from_slice(&KEY_SALT.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

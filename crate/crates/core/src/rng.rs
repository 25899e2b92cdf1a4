//! Deterministic random streams.
//!
//! Every independent work item (grid row, Monte Carlo sample, ensemble
//! member) gets its own ChaCha stream derived from a master seed and the
//! item's index, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The `index`-th stream under `master`.
pub fn stream(master: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Streams for purposes that must never collide with per-item streams.
pub fn named_stream(master: u64, name: &str) -> StreamRng {
    // FNV-1a over the name selects a stream in the upper half of the space.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    stream(master, h | (1 << 63))
}

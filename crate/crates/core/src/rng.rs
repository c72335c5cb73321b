//! Deterministic random streams derived from a single seed.
//!
//! Every consumer asks for the stream with its own index, so results do not
//! depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stream for a sub-task nested inside stream `parent`.
pub fn substream(seed: u64, parent: u64, child: u64) -> Rng {
    stream(seed ^ parent.wrapping_mul(0x9e37_79b9_7f4a_7c15), child)
}

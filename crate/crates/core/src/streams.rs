//! Counter-based random streams for replicas.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream for `(experiment, replica)`. The key is the seed, the replica selects the ChaCha stream,
/// so draws never depend on which thread runs the replica.
pub fn replica_stream(experiment: u64, replica: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(experiment);
    rng.set_stream(replica);
    rng
}

/// Stable 64-bit key from a label and a seed (FNV-1a), used as an experiment id.
pub fn experiment_key(label: &str, seed: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes().chain(seed.to_le_bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

//! Seeded random streams.
//!
//! Every stochastic stage draws from its own stream, keyed by the run seed,
//! a stage label and an item index. Adding a stage or reordering work items
//! never perturbs the draws of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, label: &str, index: u64) -> StreamRng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update(index.to_le_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Derive a child seed for a nested stage.
pub fn sub_seed(seed: u64, label: &str) -> u64 {
    use rand::RngCore;
    stream(seed, label, u64::MAX).next_u64()
}

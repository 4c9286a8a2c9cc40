//! Seeded randomness.
//!
//! Every random stream in the crate is a ChaCha20 generator seeded with a
//! 64-bit value through `SeedableRng::seed_from_u64`. ChaCha20 output is
//! specified bit-for-bit, so benchmark instances are reproducible across
//! platforms. Normal variates come from `rand_distr::StandardNormal`
//! (ziggurat), uniform variates from `Rng::random_range`.
//!
//! Child seeds are derived by hashing a list of labels with SHA-256, so a
//! seed only depends on the labels it is derived from. Adding a function or
//! an instance to an experiment never shifts the seeds of existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub type SimRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Derives a child seed from a parent seed and a path of labels.
pub fn derive_seed<S: AsRef<str>>(parent: u64, labels: &[S]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(parent.to_le_bytes());
    for label in labels {
        let label = label.as_ref().as_bytes();
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label);
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Hex SHA-256 of a byte string. Used for cache keys.
pub fn content_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

//! Per-stage seed derivation.
//!
//! A run has one global seed. Each stage draws from its own generator seeded
//! with the first eight bytes (little-endian) of
//! `SHA-256("dotstitch/<stage>/<global seed in decimal>")`, so any stage can be
//! rerun on its own and reproduce the same draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub const SPLIT: &str = "split";
pub const TRUNCATE: &str = "truncate";
pub const DIFF_TRAIN: &str = "diff-train";
pub const PLAN: &str = "plan";

pub fn derive_seed(global: u64, stage: &str) -> u64 {
    let digest = Sha256::digest(format!("dotstitch/{stage}/{global}").as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// The generator used everywhere randomness is needed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

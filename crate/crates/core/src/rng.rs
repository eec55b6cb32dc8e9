//! Seeded randomness.
//!
//! Every random draw in a session comes from one [`SessionRng`], consumed in
//! a fixed order per interaction: level action, word choice, then (for
//! simulated students) the answer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub type SessionRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

pub fn session_rng(seed: RngSeed) -> SessionRng {
    ChaCha8Rng::seed_from_u64(seed.0)
}

/// Per-run seed: the first 8 bytes (little endian) of
/// `SHA-256("qtutor/seed/v1" || base_seed_le || label || 0x00 || run_le)`.
///
/// Keyed by label rather than position so that adding a student leaves the
/// other students' streams untouched.
pub fn derive_seed(base: RngSeed, label: &str, run: u32) -> RngSeed {
    let mut hasher = Sha256::new();
    hasher.update(b"qtutor/seed/v1");
    hasher.update(base.0.to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    hasher.update(run.to_le_bytes());
    let digest = hasher.finalize();
    let mut first = [0u8; 8];
    first.copy_from_slice(&digest[..8]);
    RngSeed(u64::from_le_bytes(first))
}

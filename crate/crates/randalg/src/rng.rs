//! Seeded substream derivation for reproducible experiments.
//!
//! Every randomized operation takes a caller-provided stream. Operations
//! that fan out over independent units of work (batch trials, Monte Carlo
//! sample batches) first draw one 64-bit local master from that stream
//! and then derive one child stream per unit index through a fixed mixing
//! function. Results are therefore a function of the seed alone,
//! regardless of how the units are scheduled across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; the frozen mixing step of the substream scheme.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stream for one unit of work: `splitmix64(master ^ splitmix64(index))`
/// seeds a ChaCha8 generator.
pub fn indexed_stream(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(master ^ splitmix64(index)))
}

/// Top-level stream for a (seed, role) pair; role tags keep the streams
/// of unrelated consumers apart even under an identical master seed.
pub fn role_stream(master_seed: u64, role: u64) -> ChaCha8Rng {
    indexed_stream(master_seed ^ splitmix64(role), 0)
}

/// Draws the local master used to spawn indexed child streams.
pub fn local_master<R: RngCore + ?Sized>(rng: &mut R) -> u64 {
    rng.next_u64()
}

/// Role tags for the CLI entry points (ASCII mnemonics).
pub mod role {
    pub const GEN_THRESHOLD: u64 = 0x5448_5245_5348_4c44; // "THRESHLD"
    pub const GEN_PANCHROMATIC: u64 = 0x5041_4e43_4852_4f4d; // "PANCHROM"
    pub const BATCH: u64 = 0x4241_5443_4853_454c; // "BATCHSEL"
    pub const VERIFY: u64 = 0x5645_5249_4659_4d43; // "VERIFYMC"
    pub const BEZOUT: u64 = 0x4245_5a4f_5554_5452; // "BEZOUTTR"
    pub const COMPOSE: u64 = 0x434f_4d50_4f53_4552; // "COMPOSER"
}

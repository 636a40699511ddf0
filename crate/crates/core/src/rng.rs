//! Seed plumbing shared by every stochastic routine.
//!
//! All randomness comes from ChaCha8 streams. A single user seed fans out
//! into independent sub-seeds with [`stream_seed`], so results never depend
//! on execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Phase tags used when deriving sub-seeds.
pub mod phase {
    pub const MARGINAL: u64 = 1;
    pub const FINAL: u64 = 2;
    pub const INSTANCE: u64 = 3;
    pub const BASELINE: u64 = 4;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed for `(phase, index)` from a base seed.
pub fn stream_seed(base: u64, phase: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ phase) ^ index)
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw on `[0, 1)` with 53 bits of precision.
#[inline]
pub fn unit_f64<R: rand::RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

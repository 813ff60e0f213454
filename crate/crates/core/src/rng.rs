//! Keyed counter hashing and seeded sequential streams.
//!
//! Node lifetimes come from a stateless hash of `(seed, label)`, so a path is
//! a pure function of its seed no matter the order in which nodes are realized.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tree::NodeLabel;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Hash of a 128-bit counter under a 64-bit key.
#[inline]
pub fn hash128(key: u64, counter: u128) -> u64 {
    let lo = counter as u64;
    let hi = (counter >> 64) as u64;
    let k = mix64(key.wrapping_add(GOLDEN));
    mix64(mix64(k ^ lo).wrapping_add(k) ^ hi.wrapping_mul(GOLDEN))
}

/// Uniform on the open interval (0, 1) from 52 hashed bits.
#[inline]
pub fn open01(w: u64) -> f64 {
    ((w >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Exponential(1) lifetime of individual `u` on the path with this seed.
#[inline]
pub fn node_lifetime(seed: u64, u: NodeLabel) -> f64 {
    -open01(hash128(seed, u.code())).ln()
}

/// Independent sequential stream for `(seed, domain, index)`.
pub fn stream(seed: u64, domain: &str, index: u64) -> ChaCha8Rng {
    let mut key = mix64(seed ^ GOLDEN);
    for b in domain.bytes() {
        key = mix64(key ^ u64::from(b));
    }
    let mut bytes = [0u8; 32];
    for (i, chunk) in bytes.chunks_mut(8).enumerate() {
        let w = hash128(key, (u128::from(index) << 8) | i as u128);
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

/// Seed for the `i`-th path of a run driven by `master`.
pub fn path_seed(master: u64, i: u64) -> u64 {
    hash128(master, u128::from(i) | (1u128 << 100))
}

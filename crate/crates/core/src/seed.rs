//! Deterministic seed derivation.
//!
//! All randomness in the crate flows from one master seed. Sub-computations
//! (per candidate test, per cross-validation cell) derive their own seeds from
//! the master seed plus stable identifiers, so results do not depend on
//! evaluation order or concurrency.

/// SplitMix64 step; a cheap, well-mixed 64-bit hash.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derive a child seed from a base seed and a list of salts.
pub fn derive_seed(base: u64, salts: &[u64]) -> u64 {
    let mut s = splitmix64(base);
    for &salt in salts {
        s = splitmix64(s ^ splitmix64(salt));
    }
    s
}

/// FNV-1a over bytes; used to turn identifiers into salts.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

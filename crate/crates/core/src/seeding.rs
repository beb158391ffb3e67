//! Stable seed derivation.
//!
//! Seeds are the first eight bytes of a SHA-256 digest over little-endian
//! parts, so they do not depend on the platform or the Rust release.

use sha2::{Digest, Sha256};

/// Mixes any number of 64-bit parts into one seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.to_le_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Domain tags keep seeds for different purposes apart even when the other
/// parts coincide.
pub(crate) mod tag {
    pub const BOOTSTRAP: u64 = 0x626f_6f74;
    pub const CONFIRM: u64 = 0x636f_6e66;
    pub const REPLICATE: u64 = 0x7265_706c;
}

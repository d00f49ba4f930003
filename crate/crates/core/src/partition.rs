//! Key to shard assignment: FNV-1a-64 over the 13 key bytes, modulo the
//! shard count.

use crate::types::Isbn13Key;

pub const FNV_OFFSET_BASIS: u64 = 14_695_981_039_346_656_037;
pub const FNV_PRIME: u64 = 1_099_511_628_211;

#[inline]
pub const fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET_BASIS;
    let mut i = 0;
    while i < bytes.len() {
        hash ^= bytes[i] as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
        i += 1;
    }
    hash
}

/// Shard index in `0..shards` for `key`.
///
/// Panics if `shards` is zero; every caller holds a validated shard count.
#[inline]
pub fn partition_key(key: &Isbn13Key, shards: usize) -> usize {
    assert!(shards >= 1, "shard count must be at least 1");
    (fnv1a_64(key.as_bytes()) % shards as u64) as usize
}

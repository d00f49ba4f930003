use std::io;

use thiserror::Error;

use crate::types::Isbn13Key;

/// Rejection of a single field value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("key must be 13 digits, got {0} bytes")]
    KeyLength(usize),
    #[error("key has a non-digit byte at position {0}")]
    KeyDigit(usize),
    #[error("price must be 1-7 digits, '.', 1-2 digits")]
    PriceFormat,
    #[error("price {0} cents is out of range")]
    PriceRange(u64),
    #[error("quantity must be 1-9 digits")]
    QuantityFormat,
    #[error("quantity {0} is out of range")]
    QuantityRange(u64),
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("shard count must be at least 1")]
    ZeroShards,
}

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("dataset header must be {expected:?}, found {found:?}")]
    BadHeader {
        expected: &'static str,
        found: String,
    },
    #[error("fixed store has bad magic bytes")]
    BadMagic,
    #[error("fixed store length {actual} does not match header ({expected} bytes expected)")]
    LengthMismatch { expected: u64, actual: u64 },
    #[error("record index {index} out of range (count {count})")]
    IndexOutOfRange { index: u64, count: u64 },
    #[error("duplicate key {0} in fixed store input")]
    DuplicateKey(Isbn13Key),
    #[error("fixed store record {index} is corrupt: {source}")]
    CorruptRecord {
        index: u64,
        #[source]
        source: FieldError,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("store has {shards} shards but {workers} workers were requested")]
    ShardWorkerMismatch { shards: usize, workers: usize },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("{path}: {source}")]
    Path {
        path: String,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("record count {0} exceeds the 10^10 key space")]
    KeySpaceExhausted(u64),
    #[error("empty {0} range")]
    EmptyRange(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
}

//! Sharded in-memory inventory store with batch delta application.
//!
//! Records are split across `n` disjoint hash tables by FNV-1a-64 of the
//! key. A stock file of price/quantity overwrites is applied by one of three
//! engines (see [`engine`]); the parallel engine runs one worker per shard
//! with no shared mutable state.

pub mod codec;
pub mod engine;
pub mod error;
pub mod gen;
pub mod partition;
pub mod sample;
pub mod store;
pub mod types;

#[cfg(test)]
mod testdata;

pub use engine::{
    apply_disk_baseline, apply_parallel, apply_serial, route_deltas, run_apply, EngineKind,
    RoutedDeltas, RunConfig, RunReport,
};
pub use error::{CodecError, EngineError, FieldError, GenError, StoreError};
pub use gen::{generate, generate_records, GenSpec, SplitMix64};
pub use partition::{fnv1a_64, partition_key};
pub use store::{apply_delta_to_shard, ApplyOutcome, ApplyReport, Shard, ShardedStore, StockValue};
pub use types::{DeltaEntry, Isbn13Key, Price, Quantity, Record};

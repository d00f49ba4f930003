//! The sharded in-memory store.
//!
//! A [`ShardedStore`] owns `n` disjoint hash tables. A key lives only in
//! shard [`partition_key`]`(key, n)`, so distinct shards can be mutated from
//! different threads without coordination: hand out `&mut Shard` through
//! [`ShardedStore::shards_mut`] and each worker gets exclusive access to
//! exactly one table.

use std::collections::HashMap;
use std::time::Duration;

use crate::error::StoreError;
use crate::partition::partition_key;
use crate::types::{DeltaEntry, Isbn13Key, Price, Quantity, Record};

/// Current value held for a key.
pub type StockValue = (Price, Quantity);

/// One hash table of the store, aware of its own position.
#[derive(Debug, Clone)]
pub struct Shard {
    index: usize,
    shard_count: usize,
    entries: HashMap<Isbn13Key, StockValue>,
}

impl Shard {
    fn with_capacity(index: usize, shard_count: usize, capacity: usize) -> Self {
        Self {
            index,
            shard_count,
            entries: HashMap::with_capacity(capacity),
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &Isbn13Key) -> Option<StockValue> {
        self.entries.get(key).copied()
    }

    /// Unordered scan of this shard's rows.
    pub fn records(&self) -> impl Iterator<Item = Record> + '_ {
        self.entries
            .iter()
            .map(|(&key, &(price, quantity))| Record::new(key, price, quantity))
    }

    fn owns(&self, key: &Isbn13Key) -> bool {
        partition_key(key, self.shard_count) == self.index
    }

    fn put(&mut self, record: Record) -> bool {
        debug_assert!(self.owns(&record.key));
        self.entries
            .insert(record.key, (record.price, record.quantity))
            .is_some()
    }
}

/// Result of applying one delta to its shard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApplyOutcome {
    Applied,
    Missing,
    Inserted,
}

/// Applies `delta` to `shard` with overwrite semantics.
///
/// The delta's key must belong to this shard; routing is the caller's job
/// and a mismatch is a logic error (checked in debug builds).
pub fn apply_delta_to_shard(
    shard: &mut Shard,
    delta: &DeltaEntry,
    insert_missing: bool,
) -> ApplyOutcome {
    debug_assert!(
        shard.owns(&delta.key),
        "delta {} routed to shard {} of {}",
        delta.key,
        shard.index,
        shard.shard_count
    );
    match shard.entries.get_mut(&delta.key) {
        Some(slot) => {
            *slot = (delta.new_price, delta.new_quantity);
            ApplyOutcome::Applied
        }
        None if insert_missing => {
            shard
                .entries
                .insert(delta.key, (delta.new_price, delta.new_quantity));
            ApplyOutcome::Inserted
        }
        None => ApplyOutcome::Missing,
    }
}

/// N disjoint hash tables plus the key to shard rule.
#[derive(Debug, Clone)]
pub struct ShardedStore {
    shards: Vec<Shard>,
}

impl ShardedStore {
    pub fn new(shard_count: usize) -> Result<Self, StoreError> {
        Self::with_capacity(shard_count, 0)
    }

    /// Empty store sized for roughly `records` rows in total.
    pub fn with_capacity(shard_count: usize, records: usize) -> Result<Self, StoreError> {
        if shard_count == 0 {
            return Err(StoreError::ZeroShards);
        }
        // a little headroom over the even split absorbs hash imbalance
        let per_shard = if records == 0 {
            0
        } else {
            records / shard_count + records / (shard_count * 16) + 16
        };
        let shards = (0..shard_count)
            .map(|i| Shard::with_capacity(i, shard_count, per_shard))
            .collect();
        Ok(Self { shards })
    }

    /// Loads `records` into `shard_count` shards. Later duplicates replace
    /// earlier ones; the second element of the result counts them.
    pub fn build<I>(records: I, shard_count: usize) -> Result<(Self, usize), StoreError>
    where
        I: IntoIterator<Item = Record>,
    {
        let records = records.into_iter();
        let mut store = Self::with_capacity(shard_count, records.size_hint().0)?;
        let duplicates = records.filter(|&r| store.insert(r)).count();
        Ok((store, duplicates))
    }

    /// Inserts or replaces a row. Returns true when a row was replaced.
    pub fn insert(&mut self, record: Record) -> bool {
        let shard = partition_key(&record.key, self.shards.len());
        self.shards[shard].put(record)
    }

    /// Probes only the shard that owns `key`.
    pub fn lookup(&self, key: &Isbn13Key) -> Option<StockValue> {
        self.shards[self.shard_of(key)].get(key)
    }

    pub fn shard_of(&self, key: &Isbn13Key) -> usize {
        partition_key(key, self.shards.len())
    }

    pub fn shard_count(&self) -> usize {
        self.shards.len()
    }

    pub fn len(&self) -> usize {
        self.shards.iter().map(Shard::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.shards.iter().all(Shard::is_empty)
    }

    pub fn shards(&self) -> &[Shard] {
        &self.shards
    }

    /// Mutable access to every shard at once. Each `&mut Shard` may be sent
    /// to a different thread.
    pub fn shards_mut(&mut self) -> &mut [Shard] {
        &mut self.shards
    }

    /// Applies one delta, routing it to its shard.
    pub fn apply(&mut self, delta: &DeltaEntry, insert_missing: bool) -> ApplyOutcome {
        let shard = self.shard_of(&delta.key);
        apply_delta_to_shard(&mut self.shards[shard], delta, insert_missing)
    }

    /// Unordered scan over all rows.
    pub fn records(&self) -> impl Iterator<Item = Record> + '_ {
        self.shards.iter().flat_map(Shard::records)
    }

    /// All rows in ascending key order.
    pub fn sorted_records(&self) -> Vec<Record> {
        let mut rows: Vec<Record> = self.records().collect();
        rows.sort_unstable_by_key(|r| r.key);
        rows
    }
}

/// Counts and timing of one apply run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ApplyReport {
    pub applied: u64,
    pub missing_key: u64,
    pub inserted: u64,
    pub total_deltas: u64,
    pub wall_clock: Duration,
}

impl ApplyReport {
    pub fn record(&mut self, outcome: ApplyOutcome) {
        self.total_deltas += 1;
        match outcome {
            ApplyOutcome::Applied => self.applied += 1,
            ApplyOutcome::Missing => self.missing_key += 1,
            ApplyOutcome::Inserted => self.inserted += 1,
        }
    }

    /// Adds another report's counts into this one. Timing is left alone.
    pub fn merge_counts(&mut self, other: &ApplyReport) {
        self.applied += other.applied;
        self.missing_key += other.missing_key;
        self.inserted += other.inserted;
        self.total_deltas += other.total_deltas;
    }

    pub fn counts(&self) -> (u64, u64, u64, u64) {
        (
            self.applied,
            self.missing_key,
            self.inserted,
            self.total_deltas,
        )
    }

    pub fn is_balanced(&self) -> bool {
        self.applied + self.missing_key + self.inserted == self.total_deltas
    }

    pub fn wall_clock_millis(&self) -> u128 {
        self.wall_clock.as_millis()
    }
}

//! Deterministic synthetic inventory and stock files.
//!
//! Draw order, all from one SplitMix64 stream seeded with `seed`:
//!
//! 1. per record: key draws (`"978"` + 10 digits from `next % 10^10`,
//!    redrawn on collision), then price, then quantity;
//! 2. per record in generation order: new price, new quantity;
//! 3. Fisher-Yates over the stock entries, `j = next % (i + 1)` for
//!    `i` from `len - 1` down to 1.
//!
//! Range draws are `lo + next % (hi - lo + 1)`. The dataset CSV is written
//! in key order; the stock file in shuffled order.

use std::collections::HashSet;
use std::ops::RangeInclusive;

use crate::codec::{serialize_stock, write_records_csv};
use crate::error::GenError;
use crate::types::{DeltaEntry, Isbn13Key, Price, Quantity, Record};

const KEY_PREFIX: u64 = 9_780_000_000_000;
pub const KEY_SPACE: u64 = 10_000_000_000;

#[derive(Debug, Clone, Copy)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    #[inline]
    fn in_range(&mut self, range: &RangeInclusive<u32>) -> u32 {
        let span = (*range.end() - *range.start()) as u64 + 1;
        *range.start() + (self.next_u64() % span) as u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub record_count: u64,
    pub seed: u64,
    /// Cents, inclusive.
    pub price_range: RangeInclusive<u32>,
    /// Units, inclusive.
    pub quantity_range: RangeInclusive<u32>,
}

impl GenSpec {
    pub fn new(record_count: u64, seed: u64) -> Self {
        Self {
            record_count,
            seed,
            price_range: 1..=9_999,
            quantity_range: 0..=999,
        }
    }
}

/// Typed output of [`generate_records`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    /// Sorted by key.
    pub records: Vec<Record>,
    /// Stream order, ordinals 0..n.
    pub deltas: Vec<DeltaEntry>,
}

/// Serialized output of [`generate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedFiles {
    pub dataset_csv: Vec<u8>,
    pub stock: Vec<u8>,
}

fn check(spec: &GenSpec) -> Result<(), GenError> {
    if spec.record_count > KEY_SPACE {
        return Err(GenError::KeySpaceExhausted(spec.record_count));
    }
    if spec.price_range.is_empty() {
        return Err(GenError::EmptyRange("price"));
    }
    if spec.quantity_range.is_empty() {
        return Err(GenError::EmptyRange("quantity"));
    }
    Price::from_cents(*spec.price_range.end())?;
    Quantity::new(*spec.quantity_range.end())?;
    Ok(())
}

pub fn generate_records(spec: &GenSpec) -> Result<Generated, GenError> {
    check(spec)?;
    let count = spec.record_count as usize;
    let mut rng = SplitMix64::new(spec.seed);
    let mut seen: HashSet<u64> = HashSet::with_capacity(count);
    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        let suffix = loop {
            let draw = rng.next_u64() % KEY_SPACE;
            if seen.insert(draw) {
                break draw;
            }
        };
        let key = Isbn13Key::from_u64(KEY_PREFIX + suffix)?;
        let price = Price::from_cents(rng.in_range(&spec.price_range))?;
        let quantity = Quantity::new(rng.in_range(&spec.quantity_range))?;
        records.push(Record::new(key, price, quantity));
    }
    drop(seen);

    let mut deltas = Vec::with_capacity(count);
    for r in &records {
        let price = Price::from_cents(rng.in_range(&spec.price_range))?;
        let quantity = Quantity::new(rng.in_range(&spec.quantity_range))?;
        deltas.push(DeltaEntry::new(r.key, price, quantity, 0));
    }
    for i in (1..deltas.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        deltas.swap(i, j);
    }
    for (i, d) in deltas.iter_mut().enumerate() {
        d.source_ordinal = i as u64;
    }

    records.sort_unstable_by_key(|r| r.key);
    Ok(Generated { records, deltas })
}

/// Dataset CSV and stock file bytes for `spec`.
pub fn generate(spec: &GenSpec) -> Result<GeneratedFiles, GenError> {
    let g = generate_records(spec)?;
    Ok(GeneratedFiles {
        dataset_csv: write_records_csv(&g.records),
        stock: serialize_stock(&g.deltas),
    })
}

use crate::sample::sample_records;
use crate::types::{DeltaEntry, Isbn13Key, Price, Quantity, Record};

pub fn key(s: &str) -> Isbn13Key {
    s.parse().unwrap()
}

pub fn record(k: &str, cents: u32, units: u32) -> Record {
    Record::new(
        key(k),
        Price::from_cents(cents).unwrap(),
        Quantity::new(units).unwrap(),
    )
}

pub fn delta(k: &str, cents: u32, units: u32, ordinal: u64) -> DeltaEntry {
    DeltaEntry::new(
        key(k),
        Price::from_cents(cents).unwrap(),
        Quantity::new(units).unwrap(),
        ordinal,
    )
}

pub fn sample_rows() -> Vec<Record> {
    sample_records()
}

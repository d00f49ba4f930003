//! Dataset CSV: `bo_ISBN13,bo_price,bo_quantity` header, one row per line,
//! LF endings, prices with two decimals. No quoting; none of the fields can
//! contain a comma.

use crate::error::CodecError;
use crate::store::ShardedStore;
use crate::types::{Isbn13Key, Price, Quantity, Record};

pub const DATASET_HEADER: &str = "bo_ISBN13,bo_price,bo_quantity";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CsvLoad {
    pub records: Vec<Record>,
    pub malformed: u64,
    /// 1-based line numbers of the first few malformed lines.
    pub malformed_lines: Vec<usize>,
}

impl CsvLoad {
    pub fn malformed_ratio(&self) -> f64 {
        let attempted = self.records.len() as u64 + self.malformed;
        if attempted == 0 {
            0.0
        } else {
            self.malformed as f64 / attempted as f64
        }
    }
}

/// Reads a dataset. A missing or wrong header means the wrong file was
/// given and fails the whole load; bad rows are skipped and counted.
pub fn load_dataset_csv(bytes: &[u8]) -> Result<CsvLoad, CodecError> {
    let mut lines = bytes.split(|&b| b == b'\n').map(trim_cr);
    let header = lines.next().unwrap_or_default();
    if header != DATASET_HEADER.as_bytes() {
        return Err(CodecError::BadHeader {
            expected: DATASET_HEADER,
            found: String::from_utf8_lossy(&header[..header.len().min(64)]).into_owned(),
        });
    }

    let mut load = CsvLoad {
        records: Vec::with_capacity(bytes.len() / 24),
        ..Default::default()
    };
    for (i, line) in lines.enumerate() {
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        match parse_row(line) {
            Some(record) => load.records.push(record),
            None => {
                load.malformed += 1;
                if load.malformed_lines.len() < super::MAX_SAMPLES {
                    load.malformed_lines.push(i + 2);
                }
            }
        }
    }
    Ok(load)
}

fn trim_cr(line: &[u8]) -> &[u8] {
    line.strip_suffix(b"\r").unwrap_or(line)
}

fn parse_row(line: &[u8]) -> Option<Record> {
    let mut fields = line.split(|&b| b == b',');
    let key = Isbn13Key::from_digits(fields.next()?).ok()?;
    let price = Price::parse_text(fields.next()?).ok()?;
    let quantity = Quantity::parse_text(fields.next()?).ok()?;
    if fields.next().is_some() {
        return None;
    }
    Some(Record::new(key, price, quantity))
}

/// Canonical write-back: header then every row in ascending key order.
/// Depends only on the store's contents, not on shard count or history.
pub fn write_dataset_csv(store: &ShardedStore) -> Vec<u8> {
    write_records_csv(&store.sorted_records())
}

/// Writes `records` in the given order. Callers wanting canonical output
/// pass rows sorted by key.
pub fn write_records_csv(records: &[Record]) -> Vec<u8> {
    let mut out = Vec::with_capacity(DATASET_HEADER.len() + 1 + records.len() * 26);
    out.extend_from_slice(DATASET_HEADER.as_bytes());
    out.push(b'\n');
    for r in records {
        out.extend_from_slice(r.key.as_bytes());
        out.push(b',');
        r.price.write_text(&mut out);
        out.push(b',');
        r.quantity.write_text(&mut out);
        out.push(b'\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::sample::{sample_records, SAMPLE_DATASET_CSV};
    use crate::testdata::record;

    #[test]
    fn single_row() {
        let input = format!("{DATASET_HEADER}\n9780000004381,1.16,91\n");
        let load = load_dataset_csv(input.as_bytes()).unwrap();
        assert_eq!(load.records, vec![record("9780000004381", 116, 91)]);
        assert_eq!(load.malformed, 0);
    }

    #[test]
    fn header_only() {
        let load = load_dataset_csv(format!("{DATASET_HEADER}\n").as_bytes()).unwrap();
        assert!(load.records.is_empty());
        let load = load_dataset_csv(DATASET_HEADER.as_bytes()).unwrap();
        assert!(load.records.is_empty());
    }

    #[test]
    fn wrong_header_is_hard_error() {
        for bad in [
            "",
            "isbn,price,qty\n",
            "9780000004381,1.16,91\n",
            "bo_ISBN13,bo_price\n",
        ] {
            assert!(
                matches!(
                    load_dataset_csv(bad.as_bytes()),
                    Err(CodecError::BadHeader { .. })
                ),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn sample_rows() {
        let load = load_dataset_csv(SAMPLE_DATASET_CSV.as_bytes()).unwrap();
        assert_eq!(load.records.len(), 15);
        assert_eq!(
            *load.records.last().unwrap(),
            record("9780000082215", 258, 166)
        );
        assert_eq!(load.records, sample_records());
    }

    #[test]
    fn malformed_rows_skipped() {
        let input = format!(
            "{DATASET_HEADER}\r\n9780000004381,1.16,91\r\n\nbad,row\n9780000010457,2.42,424,extra\n978000001045,1.00,1\n9780000012128,1.7,445\n"
        );
        let load = load_dataset_csv(input.as_bytes()).unwrap();
        assert_eq!(
            load.records,
            vec![
                record("9780000004381", 116, 91),
                record("9780000012128", 170, 445)
            ]
        );
        assert_eq!(load.malformed, 3);
        assert_eq!(load.malformed_lines, vec![4, 5, 6]);
    }

    #[test]
    fn write_is_canonical() {
        let (a, _) = ShardedStore::build(sample_records(), 1).unwrap();
        let mut reversed = sample_records();
        reversed.reverse();
        let (b, _) = ShardedStore::build(reversed, 12).unwrap();
        assert_eq!(write_dataset_csv(&a), write_dataset_csv(&b));
        assert_eq!(write_dataset_csv(&a), SAMPLE_DATASET_CSV.as_bytes());
        let empty = ShardedStore::new(3).unwrap();
        assert_eq!(
            write_dataset_csv(&empty),
            format!("{DATASET_HEADER}\n").as_bytes()
        );
    }

    proptest! {
        #[test]
        fn round_trip_and_shard_independence(
            rows in prop::collection::vec((0u64..100_000, 0u32..1_000_000, 0u32..100_000), 0..200),
        ) {
            let records: Vec<Record> = rows
                .into_iter()
                .map(|(k, p, q)| Record::new(
                    Isbn13Key::from_u64(9_780_000_000_000 + k).unwrap(),
                    Price::from_cents(p).unwrap(),
                    Quantity::new(q).unwrap(),
                ))
                .collect();
            let outputs: Vec<Vec<u8>> = [1, 3, 12]
                .iter()
                .map(|&n| write_dataset_csv(&ShardedStore::build(records.clone(), n).unwrap().0))
                .collect();
            prop_assert_eq!(&outputs[0], &outputs[1]);
            prop_assert_eq!(&outputs[0], &outputs[2]);

            let reloaded = load_dataset_csv(&outputs[0]).unwrap();
            prop_assert_eq!(reloaded.malformed, 0);
            let (rebuilt, _) = ShardedStore::build(reloaded.records, 5).unwrap();
            let (original, _) = ShardedStore::build(records, 5).unwrap();
            prop_assert_eq!(rebuilt.sorted_records(), original.sorted_records());
        }
    }
}

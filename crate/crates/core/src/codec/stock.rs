//! Stock stream grammar.
//!
//! ```text
//! entry := key '$' price '$' qty '$'
//! key   := 13 DIGIT
//! price := 1*7 DIGIT '.' 1*2 DIGIT
//! qty   := 1*9 DIGIT
//! ```
//!
//! Entries may be separated by LF, CRLF or nothing at all; other ASCII
//! whitespace between entries is ignored. A malformed region is skipped up
//! to the next LF, or when no LF follows, up to the next plausible
//! `13 DIGIT '$'` run.

use std::fmt;

use crate::types::{DeltaEntry, Isbn13Key, Price, Quantity};

/// Cap on `StockParseReport::malformed_samples`.
pub const MAX_SAMPLES: usize = 10;

// "9999999.99" plus the closing '$'
const MAX_PRICE_FIELD: usize = 10;
const MAX_QTY_FIELD: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StockFault {
    Key,
    KeyDelimiter,
    Price,
    Quantity,
    Truncated,
}

impl fmt::Display for StockFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StockFault::Key => "key is not 13 digits",
            StockFault::KeyDelimiter => "missing '$' after key",
            StockFault::Price => "bad price field",
            StockFault::Quantity => "bad quantity field",
            StockFault::Truncated => "input ends inside an entry",
        })
    }
}

/// How the input bytes were classified. The three buckets always sum to the
/// input length.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ByteCoverage {
    pub entries: usize,
    pub separators: usize,
    pub malformed: usize,
}

impl ByteCoverage {
    pub fn total(&self) -> usize {
        self.entries + self.separators + self.malformed
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StockParseReport {
    /// Accepted entries in stream order, ordinals contiguous from 0.
    pub entries: Vec<DeltaEntry>,
    pub malformed: u64,
    /// Up to [`MAX_SAMPLES`] (byte offset, fault) pairs.
    pub malformed_samples: Vec<(usize, StockFault)>,
    pub coverage: ByteCoverage,
}

impl StockParseReport {
    /// Fraction of attempted entries that were malformed, in `0.0..=1.0`.
    pub fn malformed_ratio(&self) -> f64 {
        let attempted = self.entries.len() as u64 + self.malformed;
        if attempted == 0 {
            0.0
        } else {
            self.malformed as f64 / attempted as f64
        }
    }
}

/// Parses a whole stock stream. Never fails; bad regions are counted.
pub fn parse_stock_stream(bytes: &[u8]) -> StockParseReport {
    let mut report = StockParseReport {
        entries: Vec::with_capacity(bytes.len() / 24),
        ..Default::default()
    };
    let mut pos = 0;
    while pos < bytes.len() {
        if bytes[pos].is_ascii_whitespace() {
            report.coverage.separators += 1;
            pos += 1;
            continue;
        }
        match parse_entry(bytes, pos) {
            Ok((key, price, quantity, end)) => {
                let ordinal = report.entries.len() as u64;
                report
                    .entries
                    .push(DeltaEntry::new(key, price, quantity, ordinal));
                report.coverage.entries += end - pos;
                pos = end;
            }
            Err(fault) => {
                report.malformed += 1;
                if report.malformed_samples.len() < MAX_SAMPLES {
                    report.malformed_samples.push((pos, fault));
                }
                let resume = recovery_point(bytes, pos);
                report.coverage.malformed += resume - pos;
                pos = resume;
            }
        }
    }
    report
}

fn parse_entry(
    bytes: &[u8],
    start: usize,
) -> Result<(Isbn13Key, Price, Quantity, usize), StockFault> {
    let key_end = start + Isbn13Key::LEN;
    let Some(key_bytes) = bytes.get(start..key_end) else {
        return Err(if bytes[start..].iter().all(u8::is_ascii_digit) {
            StockFault::Truncated
        } else {
            StockFault::Key
        });
    };
    let key = Isbn13Key::from_digits(key_bytes).map_err(|_| StockFault::Key)?;
    match bytes.get(key_end) {
        Some(b'$') => {}
        Some(_) => return Err(StockFault::KeyDelimiter),
        None => return Err(StockFault::Truncated),
    }
    let (price_bytes, after_price) =
        dollar_field(bytes, key_end + 1, MAX_PRICE_FIELD, StockFault::Price)?;
    let price = Price::parse_text(price_bytes).map_err(|_| StockFault::Price)?;
    let (qty_bytes, end) = dollar_field(bytes, after_price, MAX_QTY_FIELD, StockFault::Quantity)?;
    let quantity = Quantity::parse_text(qty_bytes).map_err(|_| StockFault::Quantity)?;
    Ok((key, price, quantity, end))
}

/// Field starting at `from` and closed by '$' within `max_len + 1` bytes.
/// Returns the field and the index just past the '$'.
fn dollar_field(
    bytes: &[u8],
    from: usize,
    max_len: usize,
    fault: StockFault,
) -> Result<(&[u8], usize), StockFault> {
    let window_end = (from + max_len + 1).min(bytes.len());
    let window = bytes.get(from..window_end).unwrap_or(&[]);
    match window.iter().position(|&b| b == b'$') {
        Some(len) => Ok((&window[..len], from + len + 1)),
        None if window_end == bytes.len() && window.len() <= max_len => Err(StockFault::Truncated),
        None => Err(fault),
    }
}

fn recovery_point(bytes: &[u8], start: usize) -> usize {
    if let Some(lf) = bytes[start..].iter().position(|&b| b == b'\n') {
        return start + lf;
    }
    (start + 1..bytes.len())
        .find(|&i| plausible_entry_start(bytes, i))
        .unwrap_or(bytes.len())
}

fn plausible_entry_start(bytes: &[u8], i: usize) -> bool {
    let key_end = i + Isbn13Key::LEN;
    key_end < bytes.len()
        && !bytes[i - 1].is_ascii_digit()
        && bytes[i..key_end].iter().all(u8::is_ascii_digit)
        && bytes[key_end] == b'$'
}

/// Canonical form: one LF-terminated entry per line, two-decimal prices.
pub fn serialize_stock(entries: &[DeltaEntry]) -> Vec<u8> {
    let mut out = Vec::with_capacity(entries.len() * 26);
    for e in entries {
        out.extend_from_slice(e.key.as_bytes());
        out.push(b'$');
        e.new_price.write_text(&mut out);
        out.push(b'$');
        e.new_quantity.write_text(&mut out);
        out.extend_from_slice(b"$\n");
    }
    out
}

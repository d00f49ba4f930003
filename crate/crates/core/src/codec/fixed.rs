//! Fixed-width binary store.
//!
//! ```text
//! header  16 bytes  "MBMPFIX1" | record count (u64 LE)
//! record  32 bytes  key digits [0..13) | 0x00 | price cents u64 LE [14..22)
//!                   | quantity u32 LE [22..26) | 0x00 pad [26..32)
//! ```
//!
//! Records are sorted ascending by key with no duplicates, so a key can be
//! located with O(log n) seeks and updated in place.

use std::fs::File;
use std::io::{self, Cursor, Read, Seek, SeekFrom, Write};

use crate::error::{CodecError, FieldError};
use crate::types::{Isbn13Key, Price, Quantity, Record};

pub const FIXED_MAGIC: &[u8; 8] = b"MBMPFIX1";
pub const FIXED_HEADER_LEN: u64 = 16;
pub const FIXED_RECORD_LEN: u64 = 32;

const PRICE_AT: usize = 14;
const QTY_AT: usize = 22;
const VALUE_END: usize = 26;

pub fn encode_fixed_record(record: &Record) -> [u8; FIXED_RECORD_LEN as usize] {
    let mut buf = [0u8; FIXED_RECORD_LEN as usize];
    buf[..Isbn13Key::LEN].copy_from_slice(record.key.as_bytes());
    write_value(&mut buf[PRICE_AT..VALUE_END], record.price, record.quantity);
    buf
}

fn write_value(slot: &mut [u8], price: Price, quantity: Quantity) {
    slot[..8].copy_from_slice(&(price.cents() as u64).to_le_bytes());
    slot[8..12].copy_from_slice(&quantity.units().to_le_bytes());
}

pub fn decode_fixed_record(buf: &[u8; FIXED_RECORD_LEN as usize]) -> Result<Record, FieldError> {
    let key = Isbn13Key::from_digits(&buf[..Isbn13Key::LEN])?;
    let cents = u64::from_le_bytes(buf[PRICE_AT..QTY_AT].try_into().unwrap());
    let units = u32::from_le_bytes(buf[QTY_AT..VALUE_END].try_into().unwrap());
    let cents = u32::try_from(cents).map_err(|_| FieldError::PriceRange(cents))?;
    Ok(Record::new(
        key,
        Price::from_cents(cents)?,
        Quantity::new(units)?,
    ))
}

/// Serializes `records` into a complete file image, sorting by key.
/// Duplicate keys are rejected.
pub fn write_fixed_store(records: &[Record]) -> Result<Vec<u8>, CodecError> {
    let mut sorted = records.to_vec();
    sorted.sort_unstable_by_key(|r| r.key);
    if let Some(pair) = sorted.windows(2).find(|w| w[0].key == w[1].key) {
        return Err(CodecError::DuplicateKey(pair[0].key));
    }
    let mut out =
        Vec::with_capacity(FIXED_HEADER_LEN as usize + sorted.len() * FIXED_RECORD_LEN as usize);
    out.extend_from_slice(FIXED_MAGIC);
    out.extend_from_slice(&(sorted.len() as u64).to_le_bytes());
    for r in &sorted {
        out.extend_from_slice(&encode_fixed_record(r));
    }
    Ok(out)
}

pub fn is_fixed_store(bytes: &[u8]) -> bool {
    bytes.starts_with(FIXED_MAGIC)
}

fn parse_header(header: &[u8]) -> Result<u64, CodecError> {
    if header.len() < FIXED_HEADER_LEN as usize {
        return Err(CodecError::LengthMismatch {
            expected: FIXED_HEADER_LEN,
            actual: header.len() as u64,
        });
    }
    if &header[..8] != FIXED_MAGIC {
        return Err(CodecError::BadMagic);
    }
    Ok(u64::from_le_bytes(header[8..16].try_into().unwrap()))
}

fn expected_len(count: u64) -> u64 {
    count
        .saturating_mul(FIXED_RECORD_LEN)
        .saturating_add(FIXED_HEADER_LEN)
}

/// Decodes a whole in-memory file image, in file order.
pub fn decode_fixed_store(bytes: &[u8]) -> Result<Vec<Record>, CodecError> {
    let count = parse_header(bytes)?;
    if bytes.len() as u64 != expected_len(count) {
        return Err(CodecError::LengthMismatch {
            expected: expected_len(count),
            actual: bytes.len() as u64,
        });
    }
    bytes[FIXED_HEADER_LEN as usize..]
        .chunks_exact(FIXED_RECORD_LEN as usize)
        .enumerate()
        .map(|(i, chunk)| {
            decode_fixed_record(chunk.try_into().unwrap()).map_err(|source| {
                CodecError::CorruptRecord {
                    index: i as u64,
                    source,
                }
            })
        })
        .collect()
}

/// Durability barrier for the disk baseline's periodic flush.
pub trait SyncData {
    fn sync_data(&mut self) -> io::Result<()>;
}

impl SyncData for File {
    fn sync_data(&mut self) -> io::Result<()> {
        File::sync_data(self)
    }
}

impl SyncData for Cursor<Vec<u8>> {
    fn sync_data(&mut self) -> io::Result<()> {
        Ok(())
    }
}

impl SyncData for Cursor<&mut Vec<u8>> {
    fn sync_data(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Seek-based access to a fixed store held in `F`.
#[derive(Debug)]
pub struct FixedStore<F> {
    file: F,
    count: u64,
}

impl<F: Read + Seek> FixedStore<F> {
    /// Validates magic and length. A file whose length disagrees with its
    /// header count is rejected as truncated.
    pub fn open(mut file: F) -> Result<Self, CodecError> {
        let actual = file.seek(SeekFrom::End(0))?;
        file.seek(SeekFrom::Start(0))?;
        let mut header = [0u8; FIXED_HEADER_LEN as usize];
        let read = read_up_to(&mut file, &mut header)?;
        let count = parse_header(&header[..read])?;
        if actual != expected_len(count) {
            return Err(CodecError::LengthMismatch {
                expected: expected_len(count),
                actual,
            });
        }
        Ok(Self { file, count })
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    fn check_index(&self, index: u64) -> Result<(), CodecError> {
        if index >= self.count {
            return Err(CodecError::IndexOutOfRange {
                index,
                count: self.count,
            });
        }
        Ok(())
    }

    fn offset(index: u64) -> u64 {
        FIXED_HEADER_LEN + index * FIXED_RECORD_LEN
    }

    pub fn read_record(&mut self, index: u64) -> Result<Record, CodecError> {
        self.check_index(index)?;
        let mut buf = [0u8; FIXED_RECORD_LEN as usize];
        self.file.seek(SeekFrom::Start(Self::offset(index)))?;
        self.file.read_exact(&mut buf)?;
        decode_fixed_record(&buf).map_err(|source| CodecError::CorruptRecord { index, source })
    }

    fn read_key(&mut self, index: u64) -> Result<[u8; Isbn13Key::LEN], CodecError> {
        let mut key = [0u8; Isbn13Key::LEN];
        self.file.seek(SeekFrom::Start(Self::offset(index)))?;
        self.file.read_exact(&mut key)?;
        Ok(key)
    }

    /// Binary search by seeking; reads only key bytes of the probed records.
    pub fn find(&mut self, key: &Isbn13Key) -> Result<Option<u64>, CodecError> {
        let (mut lo, mut hi) = (0u64, self.count);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.read_key(mid)?.as_slice().cmp(key.as_bytes()) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Ok(Some(mid)),
            }
        }
        Ok(None)
    }

    /// Every record in file order.
    pub fn read_all(&mut self) -> Result<Vec<Record>, CodecError> {
        (0..self.count).map(|i| self.read_record(i)).collect()
    }

    pub fn into_inner(self) -> F {
        self.file
    }
}

impl<F: Read + Write + Seek> FixedStore<F> {
    /// Rewrites bytes 14..26 of record `index` in place.
    pub fn overwrite_record(
        &mut self,
        index: u64,
        price: Price,
        quantity: Quantity,
    ) -> Result<(), CodecError> {
        self.check_index(index)?;
        let mut value = [0u8; VALUE_END - PRICE_AT];
        write_value(&mut value, price, quantity);
        self.file
            .seek(SeekFrom::Start(Self::offset(index) + PRICE_AT as u64))?;
        self.file.write_all(&value)?;
        Ok(())
    }
}

impl<F: Write + SyncData> FixedStore<F> {
    pub fn sync(&mut self) -> Result<(), CodecError> {
        self.file.flush()?;
        self.file.sync_data()?;
        Ok(())
    }
}

fn read_up_to<R: Read>(reader: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

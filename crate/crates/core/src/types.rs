//! Domain types for the inventory schema: ISBN-13 keys, money in integer
//! cents, unit quantities, dataset rows and stock-file updates.

use std::fmt;
use std::str::FromStr;

use crate::error::FieldError;

/// Upper bound shared by [`Price`] cents and [`Quantity`] units.
pub const MAX_FIELD_VALUE: u32 = 999_999_999;

/// A 13-digit ISBN key stored as its raw ASCII digits.
///
/// Ordering is byte-lexicographic, which matches numeric order because
/// the length is fixed.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Isbn13Key([u8; Isbn13Key::LEN]);

impl Isbn13Key {
    pub const LEN: usize = 13;

    /// Validates exactly 13 ASCII decimal digits.
    pub fn from_digits(bytes: &[u8]) -> Result<Self, FieldError> {
        if bytes.len() != Self::LEN {
            return Err(FieldError::KeyLength(bytes.len()));
        }
        if let Some(pos) = bytes.iter().position(|b| !b.is_ascii_digit()) {
            return Err(FieldError::KeyDigit(pos));
        }
        let mut digits = [0u8; Self::LEN];
        digits.copy_from_slice(bytes);
        Ok(Self(digits))
    }

    /// Builds a key from a number below 10^13, zero padded on the left.
    pub fn from_u64(mut value: u64) -> Result<Self, FieldError> {
        if value >= 10_000_000_000_000 {
            return Err(FieldError::KeyLength(value.to_string().len()));
        }
        let mut digits = [b'0'; Self::LEN];
        for slot in digits.iter_mut().rev() {
            *slot = b'0' + (value % 10) as u8;
            value /= 10;
        }
        Ok(Self(digits))
    }

    #[inline]
    pub fn as_bytes(&self) -> &[u8; Self::LEN] {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        // invariant: all bytes are ASCII digits
        std::str::from_utf8(&self.0).expect("key digits are ASCII")
    }
}

impl fmt::Display for Isbn13Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Isbn13Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Isbn13Key({})", self.as_str())
    }
}

impl FromStr for Isbn13Key {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_digits(s.as_bytes())
    }
}

/// Money in integer cents. Never represented as a float.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Price(u32);

impl Price {
    pub const MAX: Price = Price(MAX_FIELD_VALUE);

    pub fn from_cents(cents: u32) -> Result<Self, FieldError> {
        if cents > MAX_FIELD_VALUE {
            return Err(FieldError::PriceRange(cents as u64));
        }
        Ok(Self(cents))
    }

    #[inline]
    pub fn cents(self) -> u32 {
        self.0
    }

    /// Parses `1-7 digits '.' 1-2 digits`. A single fractional digit is
    /// tenths, so "3.9" is 390 cents.
    pub fn parse_text(bytes: &[u8]) -> Result<Self, FieldError> {
        let dot = bytes
            .iter()
            .position(|&b| b == b'.')
            .ok_or(FieldError::PriceFormat)?;
        let (whole, frac) = (&bytes[..dot], &bytes[dot + 1..]);
        if !(1..=7).contains(&whole.len()) || !(1..=2).contains(&frac.len()) {
            return Err(FieldError::PriceFormat);
        }
        if !whole.iter().chain(frac).all(u8::is_ascii_digit) {
            return Err(FieldError::PriceFormat);
        }
        let whole = digits_value(whole);
        let mut frac_cents = digits_value(frac);
        if frac.len() == 1 {
            frac_cents *= 10;
        }
        // 7 whole digits plus 99 cents tops out at MAX_FIELD_VALUE
        Ok(Self((whole * 100 + frac_cents) as u32))
    }

    /// Appends the canonical two-decimal rendering.
    pub fn write_text(self, out: &mut Vec<u8>) {
        push_decimal(out, (self.0 / 100) as u64);
        out.push(b'.');
        let frac = self.0 % 100;
        out.push(b'0' + (frac / 10) as u8);
        out.push(b'0' + (frac % 10) as u8);
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

impl FromStr for Price {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_text(s.as_bytes())
    }
}

/// Stock units on hand.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quantity(u32);

impl Quantity {
    pub const MAX: Quantity = Quantity(MAX_FIELD_VALUE);

    pub fn new(units: u32) -> Result<Self, FieldError> {
        if units > MAX_FIELD_VALUE {
            return Err(FieldError::QuantityRange(units as u64));
        }
        Ok(Self(units))
    }

    #[inline]
    pub fn units(self) -> u32 {
        self.0
    }

    /// Parses 1-9 ASCII digits.
    pub fn parse_text(bytes: &[u8]) -> Result<Self, FieldError> {
        if !(1..=9).contains(&bytes.len()) || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(FieldError::QuantityFormat);
        }
        Ok(Self(digits_value(bytes) as u32))
    }

    pub fn write_text(self, out: &mut Vec<u8>) {
        push_decimal(out, self.0 as u64);
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Quantity {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_text(s.as_bytes())
    }
}

/// One inventory row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Record {
    pub key: Isbn13Key,
    pub price: Price,
    pub quantity: Quantity,
}

impl Record {
    pub fn new(key: Isbn13Key, price: Price, quantity: Quantity) -> Self {
        Self {
            key,
            price,
            quantity,
        }
    }
}

/// One stock-file update. Overwrites both price and quantity of `key`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeltaEntry {
    pub key: Isbn13Key,
    pub new_price: Price,
    pub new_quantity: Quantity,
    /// Position of the entry in the stock stream, starting at 0.
    pub source_ordinal: u64,
}

impl DeltaEntry {
    pub fn new(
        key: Isbn13Key,
        new_price: Price,
        new_quantity: Quantity,
        source_ordinal: u64,
    ) -> Self {
        Self {
            key,
            new_price,
            new_quantity,
            source_ordinal,
        }
    }
}

fn digits_value(digits: &[u8]) -> u64 {
    digits
        .iter()
        .fold(0u64, |acc, &d| acc * 10 + (d - b'0') as u64)
}

pub(crate) fn push_decimal(out: &mut Vec<u8>, mut value: u64) {
    let mut buf = [0u8; 20];
    let mut i = buf.len();
    loop {
        i -= 1;
        buf[i] = b'0' + (value % 10) as u8;
        value /= 10;
        if value == 0 {
            break;
        }
    }
    out.extend_from_slice(&buf[i..]);
}

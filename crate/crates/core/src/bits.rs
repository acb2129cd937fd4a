//! Bit strings and their conversion to and from unbounded integers.
//!
//! Bits are indexed from the left: index 0 is the most significant bit, so
//! [`BitString::msb`] takes a prefix and [`BitString::lsb`] takes a suffix.
//! Storage is packed eight bits per byte, most significant bit first, with
//! unused trailing bits of the last byte kept at zero so that derived
//! equality is bitwise equality including length.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitsError {
    #[error("requested {requested} bits from a string of length {available}")]
    Length { requested: usize, available: usize },
    #[error("integer needs {needed} bits but only {width} are available")]
    Overflow { needed: u64, width: usize },
    #[error("invalid bit character {0:?}")]
    Parse(char),
}

/// An ordered, finite sequence of bits. The empty string is valid.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bytes: vec![0; len.div_ceil(8)],
            len,
        }
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Interprets `bytes` most-significant-bit first; the result has
    /// `8 * bytes.len()` bits.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self {
            bytes: bytes.to_vec(),
            len: bytes.len() * 8,
        }
    }

    /// Builds a string of `len` bits from packed MSB-first bytes, ignoring
    /// anything past `len`.
    pub fn from_packed(bytes: &[u8], len: usize) -> Result<Self, BitsError> {
        if len.div_ceil(8) > bytes.len() {
            return Err(BitsError::Length {
                requested: len,
                available: bytes.len() * 8,
            });
        }
        let mut out = Self {
            bytes: bytes[..len.div_ceil(8)].to_vec(),
            len,
        };
        out.clear_tail();
        Ok(out)
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = Self::new();
        for b in bits {
            out.push(b);
        }
        out
    }

    /// Parses a string of `0`/`1` characters. Whitespace and `_` are skipped.
    pub fn parse(s: &str) -> Result<Self, BitsError> {
        let mut out = Self::new();
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                c if c.is_whitespace() || c == '_' => {}
                c => return Err(BitsError::Parse(c)),
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed MSB-first bytes; trailing bits of the last byte are zero.
    pub fn as_packed(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_packed(self) -> Vec<u8> {
        self.bytes
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        (index < self.len).then(|| self.bytes[index / 8] & (0x80 >> (index % 8)) != 0)
    }

    pub fn set(&mut self, index: usize, bit: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        let mask = 0x80 >> (index % 8);
        if bit {
            self.bytes[index / 8] |= mask;
        } else {
            self.bytes[index / 8] &= !mask;
        }
    }

    pub fn flip(&mut self, index: usize) {
        let bit = self.get(index).expect("bit index out of range");
        self.set(index, !bit);
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bytes[i / 8] & (0x80 >> (i % 8)) != 0)
    }

    /// Number of one bits.
    pub fn hamming_weight(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// The leftmost `x` bits.
    pub fn msb(&self, x: usize) -> Result<Self, BitsError> {
        self.slice(0, x)
    }

    /// The rightmost `x` bits.
    pub fn lsb(&self, x: usize) -> Result<Self, BitsError> {
        let start = self.len.checked_sub(x).ok_or(BitsError::Length {
            requested: x,
            available: self.len,
        })?;
        self.slice(start, x)
    }

    /// `len` bits starting at `start` (counted from the left).
    pub fn slice(&self, start: usize, len: usize) -> Result<Self, BitsError> {
        match start.checked_add(len) {
            Some(end) if end <= self.len => {}
            _ => {
                return Err(BitsError::Length {
                    requested: start.saturating_add(len),
                    available: self.len,
                })
            }
        }
        let mut out = Self::with_capacity(len);
        out.append_range(self, start, len);
        Ok(out)
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitString) -> Self {
        let mut out = Self::with_capacity(self.len + other.len);
        out.append(self);
        out.append(other);
        out
    }

    pub fn append(&mut self, other: &BitString) {
        self.append_range(other, 0, other.len);
    }

    /// Appends `src[start..start + len]`. Caller guarantees the range is in bounds.
    fn append_range(&mut self, src: &BitString, start: usize, len: usize) {
        if len == 0 {
            return;
        }
        let src_byte = start / 8;
        let src_shift = start % 8;
        let full = len / 8;
        let rem = len % 8;

        // Gather the source range into byte-aligned chunks.
        let fetch = |i: usize| -> u8 {
            let hi = src.bytes[src_byte + i] << src_shift;
            if src_shift == 0 {
                hi
            } else {
                let lo = src.bytes.get(src_byte + i + 1).copied().unwrap_or(0);
                hi | (lo >> (8 - src_shift))
            }
        };

        let dst_shift = self.len % 8;
        let push_byte = |this: &mut Self, byte: u8, nbits: usize| {
            // `byte` carries `nbits` meaningful high bits, low bits zero.
            if dst_shift == 0 {
                this.bytes.push(byte);
            } else {
                let last = this.bytes.len() - 1;
                this.bytes[last] |= byte >> dst_shift;
                if nbits > 8 - dst_shift {
                    this.bytes.push(byte << (8 - dst_shift));
                }
            }
            this.len += nbits;
        };

        for i in 0..full {
            let b = fetch(i);
            push_byte(self, b, 8);
        }
        if rem > 0 {
            let b = fetch(full) & (0xFFu8 << (8 - rem));
            push_byte(self, b, rem);
        }
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 8;
        if rem != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= 0xFFu8 << (8 - rem);
            }
        }
    }

    /// Big-endian integer value; the empty string maps to zero.
    pub fn to_integer(&self) -> BigUint {
        let pad = (8 - self.len % 8) % 8;
        if pad == 0 {
            return BigUint::from_bytes_be(&self.bytes);
        }
        let mut aligned = Self::zeros(pad);
        aligned.append(self);
        BigUint::from_bytes_be(&aligned.bytes)
    }

    /// The `width`-bit big-endian representation of `y`, left-padded with zeros.
    pub fn from_integer(y: &BigUint, width: usize) -> Result<Self, BitsError> {
        let needed = y.bits();
        if needed > width as u64 {
            return Err(BitsError::Overflow { needed, width });
        }
        if needed == 0 {
            return Ok(Self::zeros(width));
        }
        let value = Self::from_bytes(&y.to_bytes_be());
        let mut out = Self::zeros(width - value.len.min(width));
        if value.len <= width {
            out.append(&value);
        } else {
            // Leading byte padding exceeds the target width; the excess is zero.
            out.append_range(&value, value.len - width, width);
        }
        Ok(out)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitString({self})")
        } else {
            write!(f, "BitString(len={})", self.len)
        }
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::from_bits(iter)
    }
}

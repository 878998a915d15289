//! Finite binary strings.
//!
//! `BitString` is the common currency of the whole crate: circuit states,
//! strings to be erased, catalysts, and codec payloads. Bit 0 is the
//! *leftmost* character in textual I/O, so `"110"` has bit 0 = 1, bit 1 = 1,
//! bit 2 = 0.

use std::fmt;
use std::ops::Index;

use thiserror::Error;

/// A finite string over {0, 1}.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitStringError {
    #[error("invalid character {found:?} at position {position} (expected '0' or '1')")]
    InvalidCharacter { position: usize, found: char },
}

impl BitString {
    pub fn new() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// All-zero string of length `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    /// All-one string of length `n`.
    pub fn ones(n: usize) -> Self {
        Self {
            bits: vec![true; n],
        }
    }

    /// Parses `'0'`/`'1'` characters; whitespace is ignored.
    pub fn from_text(text: &str) -> Result<Self, BitStringError> {
        let mut bits = Vec::with_capacity(text.len());
        for (position, ch) in text.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                c => return Err(BitStringError::InvalidCharacter { position, found: c }),
            }
        }
        Ok(Self { bits })
    }

    /// Interprets raw bytes most-significant-bit first.
    pub fn from_bytes_msb(bytes: &[u8]) -> Self {
        let mut bits = Vec::with_capacity(bytes.len() * 8);
        for &byte in bytes {
            for shift in (0..8).rev() {
                bits.push((byte >> shift) & 1 == 1);
            }
        }
        Self { bits }
    }

    /// Low `width` bits of `value`; bit `i` of the string is bit `i` of `value`.
    pub fn from_u64(value: u64, width: usize) -> Self {
        assert!(width <= 64);
        let bits = (0..width).map(|i| (value >> i) & 1 == 1).collect();
        Self { bits }
    }

    /// Packs into a `u64` with bit `i` of the string at bit `i` of the result.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len() <= 64, "bit string too wide for u64");
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.bits.get(index).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    /// Number of 1-bits.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl Index<usize> for BitString {
    type Output = bool;

    fn index(&self, index: usize) -> &bool {
        &self.bits[index]
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let s = BitString::from_text("0101").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.to_string(), "0101");
        assert!(!s[0] && s[1] && !s[2] && s[3]);
    }

    #[test]
    fn whitespace_is_ignored() {
        let s = BitString::from_text("01 10\n11").unwrap();
        assert_eq!(s.to_string(), "011011");
    }

    #[test]
    fn rejects_other_characters() {
        let err = BitString::from_text("01x").unwrap_err();
        assert_eq!(
            err,
            BitStringError::InvalidCharacter {
                position: 2,
                found: 'x'
            }
        );
    }

    #[test]
    fn u64_round_trip_keeps_bit_order() {
        // "110" = bit0 1, bit1 1, bit2 0 = value 0b011.
        let s = BitString::from_text("110").unwrap();
        assert_eq!(s.to_u64(), 0b011);
        assert_eq!(BitString::from_u64(0b011, 3), s);
    }

    #[test]
    fn bytes_msb_first() {
        let s = BitString::from_bytes_msb(&[0b1010_0000]);
        assert_eq!(s.to_string(), "10100000");
    }

    #[test]
    fn weight_counts_ones() {
        assert_eq!(BitString::from_text("101101").unwrap().weight(), 4);
        assert_eq!(BitString::zeros(8).weight(), 0);
        assert_eq!(BitString::ones(5).weight(), 5);
    }
}

//! Bit-level reading and the universal integer code shared by all codecs.
//!
//! Integers are written as the Elias gamma code of `value + 1`, so that 0 is
//! encodable: `floor(log2(value+1))` zeros, then `value + 1` in binary
//! (most significant bit first). Examples: 0 → `1`, 1 → `010`, 4 → `00101`,
//! 8 → `0001001`.

use crate::bitstring::BitString;

use super::CodecError;

/// Appends the gamma code of `value + 1` to `out`.
pub fn write_uint(out: &mut Vec<bool>, value: u64) {
    let k = value
        .checked_add(1)
        .expect("encodable integers stay below u64::MAX");
    let payload_bits = 64 - k.leading_zeros(); // position of the leading 1, ≥ 1
    for _ in 0..payload_bits - 1 {
        out.push(false);
    }
    for shift in (0..payload_bits).rev() {
        out.push((k >> shift) & 1 == 1);
    }
}

/// Bit length of the code emitted by [`write_uint`].
pub fn uint_code_len(value: u64) -> u64 {
    let payload_bits = 64 - (value + 1).leading_zeros() as u64;
    2 * payload_bits - 1
}

/// A cursor over a bit slice. Reads exactly what the formats describe;
/// whatever trails the last read is ignored, which is what makes the codes
/// self-delimiting.
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn read_bit(&mut self) -> Result<bool, CodecError> {
        let bit = *self.bits.get(self.pos).ok_or(CodecError::Truncated)?;
        self.pos += 1;
        Ok(bit)
    }

    /// Reads one gamma-coded integer, undoing the `+1` offset.
    pub fn read_uint(&mut self) -> Result<u64, CodecError> {
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(CodecError::Malformed("gamma code exceeds 64 bits"));
            }
        }
        let mut k: u64 = 1;
        for _ in 0..zeros {
            k = (k << 1) | self.read_bit()? as u64;
        }
        Ok(k - 1)
    }

    pub fn read_bits(&mut self, count: usize) -> Result<Vec<bool>, CodecError> {
        let end = self
            .pos
            .checked_add(count)
            .filter(|&e| e <= self.bits.len())
            .ok_or(CodecError::Truncated)?;
        let out = self.bits[self.pos..end].to_vec();
        self.pos = end;
        Ok(out)
    }
}

/// Convenience wrapper building a [`BitString`] from raw bits.
pub fn into_bitstring(bits: Vec<bool>) -> BitString {
    BitString::from_bits(bits)
}

//! Injective lossless compression with side information.
//!
//! Every codec here implements the same contract: `compress(V, X)` produces
//! a self-delimiting bit payload from which `decompress` reconstructs `V`
//! exactly, given the same catalyst `X`. For a fixed `X`, distinct inputs
//! always produce distinct payloads, so `(V, X) -> (code, X)` is injective
//! and the payload length is a valid erasure-cost upper bound in bits.
//!
//! The four concrete codecs:
//!
//! * `RAW` — length header, then the bits verbatim. Always works.
//! * `RLE` — length header, first bit, then run lengths. Wins on `0^N`/`1^N`.
//! * `LZ78` — dictionary coding; the phrase dictionary is pre-loaded by
//!   parsing the catalyst, which is how a priori knowledge about `V` helps
//!   without being consumed.
//! * `COPYREF` — literal bits interleaved with (offset, length) references
//!   into the catalyst; when `X == V` the whole string collapses to one
//!   reference of `O(log len)` bits.
//!
//! `BEST` is the virtual codec: the shortest of the four plus a 2-bit tag
//! that keeps the family injective.
//!
//! All variable-length integers use the gamma code of `value + 1` (see
//! [`bitio`]).

pub mod bitio;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bitstring::BitString;

use bitio::{uint_code_len, write_uint, BitReader};

/// Identifies a codec. `Best` selects the shortest concrete code and
/// prefixes a 2-bit tag naming the winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodecId {
    Raw,
    Rle,
    Lz78,
    CopyRef,
    Best,
}

/// The concrete codecs, in tag order. `Best` minimizes over exactly these.
pub const CONCRETE_CODECS: [CodecId; 4] =
    [CodecId::Raw, CodecId::Rle, CodecId::Lz78, CodecId::CopyRef];

impl CodecId {
    fn tag_bits(self) -> [bool; 2] {
        match self {
            CodecId::Raw => [false, false],
            CodecId::Rle => [false, true],
            CodecId::Lz78 => [true, false],
            CodecId::CopyRef => [true, true],
            CodecId::Best => unreachable!("BEST has no tag of its own"),
        }
    }

    fn from_tag_bits(bits: [bool; 2]) -> CodecId {
        match bits {
            [false, false] => CodecId::Raw,
            [false, true] => CodecId::Rle,
            [true, false] => CodecId::Lz78,
            [true, true] => CodecId::CopyRef,
        }
    }

    /// Byte identifier used in the serialized code-word framing.
    pub fn id_byte(self) -> u8 {
        match self {
            CodecId::Raw => 0,
            CodecId::Rle => 1,
            CodecId::Lz78 => 2,
            CodecId::CopyRef => 3,
            CodecId::Best => 4,
        }
    }

    pub fn from_id_byte(byte: u8) -> Result<CodecId, CodecError> {
        match byte {
            0 => Ok(CodecId::Raw),
            1 => Ok(CodecId::Rle),
            2 => Ok(CodecId::Lz78),
            3 => Ok(CodecId::CopyRef),
            4 => Ok(CodecId::Best),
            other => Err(CodecError::UnknownCodecId(other)),
        }
    }
}

impl fmt::Display for CodecId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodecId::Raw => "RAW",
            CodecId::Rle => "RLE",
            CodecId::Lz78 => "LZ78",
            CodecId::CopyRef => "COPYREF",
            CodecId::Best => "BEST",
        })
    }
}

impl FromStr for CodecId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(CodecId::Raw),
            "rle" => Ok(CodecId::Rle),
            "lz78" => Ok(CodecId::Lz78),
            "copyref" => Ok(CodecId::CopyRef),
            "best" => Ok(CodecId::Best),
            other => Err(format!(
                "unknown codec {other:?} (expected raw, rle, lz78, copyref, or best)"
            )),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("code ends before the format does (truncated input)")]
    Truncated,
    #[error("malformed code: {0}")]
    Malformed(&'static str),
    #[error(
        "reference to catalyst bits {offset}..{} but the catalyst has {catalyst_len} bits",
        offset + length
    )]
    DanglingReference {
        offset: usize,
        length: usize,
        catalyst_len: usize,
    },
    #[error("unknown codec id byte {0}")]
    UnknownCodecId(u8),
}

/// A compressed, self-delimiting code for some input string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeWord {
    pub codec: CodecId,
    pub payload: BitString,
}

impl CodeWord {
    pub fn bit_length(&self) -> u64 {
        self.payload.len() as u64
    }

    /// Serialized framing: codec id byte, gamma-coded payload bit-length,
    /// payload bits, zero-padded to a byte boundary (MSB first within each
    /// byte).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bits = Vec::with_capacity(self.payload.len() + 16);
        write_uint(&mut bits, self.payload.len() as u64);
        bits.extend(self.payload.iter());

        let mut bytes = vec![self.codec.id_byte()];
        for chunk in bits.chunks(8) {
            let mut byte = 0u8;
            for (i, &bit) in chunk.iter().enumerate() {
                if bit {
                    byte |= 1 << (7 - i);
                }
            }
            bytes.push(byte);
        }
        bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<CodeWord, CodecError> {
        let (&id, rest) = bytes.split_first().ok_or(CodecError::Truncated)?;
        let codec = CodecId::from_id_byte(id)?;
        let bits: Vec<bool> = BitString::from_bytes_msb(rest).iter().collect();
        let mut reader = BitReader::new(&bits);
        let len = reader.read_uint()? as usize;
        let payload = BitString::from_bits(reader.read_bits(len)?);
        Ok(CodeWord { codec, payload })
    }
}

/// Compresses `v` with catalyst `x`. Total: every input has a code.
pub fn compress(codec: CodecId, v: &BitString, x: &BitString) -> CodeWord {
    let payload = match codec {
        CodecId::Raw => encode_raw(v),
        CodecId::Rle => encode_rle(v),
        CodecId::Lz78 => encode_lz78(v, x),
        CodecId::CopyRef => encode_copyref(v, x),
        CodecId::Best => encode_best(v, x),
    };
    CodeWord {
        codec,
        payload: BitString::from_bits(payload),
    }
}

/// Reconstructs the original string from a code word and the catalyst it
/// was compressed against. Bits beyond the end of the format are ignored,
/// so payloads remain decodable inside longer streams.
pub fn decompress(code: &CodeWord, x: &BitString) -> Result<BitString, CodecError> {
    let bits: Vec<bool> = code.payload.iter().collect();
    let mut reader = BitReader::new(&bits);
    decode_from(code.codec, &mut reader, x)
}

fn decode_from(
    codec: CodecId,
    reader: &mut BitReader,
    x: &BitString,
) -> Result<BitString, CodecError> {
    let bits = match codec {
        CodecId::Raw => decode_raw(reader)?,
        CodecId::Rle => decode_rle(reader)?,
        CodecId::Lz78 => decode_lz78(reader, x)?,
        CodecId::CopyRef => decode_copyref(reader, x)?,
        CodecId::Best => {
            let tag = [reader.read_bit()?, reader.read_bit()?];
            return decode_from(CodecId::from_tag_bits(tag), reader, x);
        }
    };
    Ok(BitString::from_bits(bits))
}

/// Exact code length in bits, without materializing the payload where a
/// closed form exists.
pub fn code_length_bits(codec: CodecId, v: &BitString, x: &BitString) -> u64 {
    match codec {
        CodecId::Raw => uint_code_len(v.len() as u64) + v.len() as u64,
        CodecId::Rle => {
            let mut total = uint_code_len(v.len() as u64);
            if !v.is_empty() {
                total += 1;
                for run in runs(v.as_slice()) {
                    total += uint_code_len(run as u64);
                }
            }
            total
        }
        CodecId::Lz78 => encode_lz78(v, x).len() as u64,
        CodecId::CopyRef => encode_copyref(v, x).len() as u64,
        CodecId::Best => {
            2 + CONCRETE_CODECS
                .iter()
                .map(|&c| code_length_bits(c, v, x))
                .min()
                .expect("codec family is nonempty")
        }
    }
}

/// A computable stand-in for conditional Kolmogorov complexity: the minimum
/// code length over the concrete codec family.
///
/// This is an *upper estimate* of the true conditional complexity (up to the
/// usual machine constant, which is not modeled): the reported number can
/// only overshoot, never undershoot, what an optimal description would need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityEstimate {
    pub bits: u64,
    pub winning_codec: CodecId,
}

impl ComplexityEstimate {
    /// What the number means; carried into reports.
    pub const SEMANTICS: &'static str = "upper-estimate-of-K";
}

/// Minimum code length over {RAW, RLE, LZ78, COPYREF} plus the codec that
/// achieves it (first in tag order on ties).
pub fn khat(v: &BitString, x: &BitString) -> ComplexityEstimate {
    let mut best = ComplexityEstimate {
        bits: u64::MAX,
        winning_codec: CodecId::Raw,
    };
    for codec in CONCRETE_CODECS {
        let bits = code_length_bits(codec, v, x);
        if bits < best.bits {
            best = ComplexityEstimate {
                bits,
                winning_codec: codec,
            };
        }
    }
    best
}

// --- RAW ---------------------------------------------------------------

fn encode_raw(v: &BitString) -> Vec<bool> {
    let mut out = Vec::with_capacity(v.len() + 16);
    write_uint(&mut out, v.len() as u64);
    out.extend(v.iter());
    out
}

fn decode_raw(reader: &mut BitReader) -> Result<Vec<bool>, CodecError> {
    let len = reader.read_uint()? as usize;
    reader.read_bits(len)
}

// --- RLE ---------------------------------------------------------------

fn runs(bits: &[bool]) -> impl Iterator<Item = usize> + '_ {
    let mut pos = 0;
    std::iter::from_fn(move || {
        if pos >= bits.len() {
            return None;
        }
        let start = pos;
        let value = bits[pos];
        while pos < bits.len() && bits[pos] == value {
            pos += 1;
        }
        Some(pos - start)
    })
}

fn encode_rle(v: &BitString) -> Vec<bool> {
    let mut out = Vec::new();
    write_uint(&mut out, v.len() as u64);
    if v.is_empty() {
        return out;
    }
    out.push(v[0]);
    for run in runs(v.as_slice()) {
        write_uint(&mut out, run as u64);
    }
    out
}

fn decode_rle(reader: &mut BitReader) -> Result<Vec<bool>, CodecError> {
    let len = reader.read_uint()? as usize;
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return Ok(out);
    }
    let mut value = reader.read_bit()?;
    while out.len() < len {
        let run = reader.read_uint()? as usize;
        if run == 0 {
            return Err(CodecError::Malformed("zero-length run"));
        }
        if out.len() + run > len {
            return Err(CodecError::Malformed("run overruns the declared length"));
        }
        out.extend(std::iter::repeat_n(value, run));
        value = !value;
    }
    Ok(out)
}

// --- LZ78 with a catalyst-primed dictionary -----------------------------

struct PhraseTrie {
    // node 0 is the root (empty phrase)
    children: Vec<[Option<u32>; 2]>,
    parent: Vec<u32>,
    bit: Vec<bool>,
    depth: Vec<u32>,
}

impl PhraseTrie {
    /// Builds the dictionary by LZ78-parsing the catalyst: the phrases it
    /// would emit become the initial dictionary, the output is discarded.
    fn primed(x: &BitString) -> Self {
        let mut trie = PhraseTrie {
            children: vec![[None, None]],
            parent: vec![0],
            bit: vec![false],
            depth: vec![0],
        };
        let mut cur = 0u32;
        for b in x.iter() {
            match trie.child(cur, b) {
                Some(next) => cur = next,
                None => {
                    trie.add_child(cur, b);
                    cur = 0;
                }
            }
        }
        trie
    }

    fn child(&self, node: u32, bit: bool) -> Option<u32> {
        self.children[node as usize][bit as usize]
    }

    fn add_child(&mut self, node: u32, bit: bool) -> u32 {
        let id = self.children.len() as u32;
        self.children.push([None, None]);
        self.parent.push(node);
        self.bit.push(bit);
        self.depth.push(self.depth[node as usize] + 1);
        self.children[node as usize][bit as usize] = Some(id);
        id
    }

    fn len(&self) -> usize {
        self.children.len()
    }

    fn phrase(&self, node: u32) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.depth[node as usize] as usize);
        let mut cur = node;
        while cur != 0 {
            out.push(self.bit[cur as usize]);
            cur = self.parent[cur as usize];
        }
        out.reverse();
        out
    }
}

fn encode_lz78(v: &BitString, x: &BitString) -> Vec<bool> {
    let mut trie = PhraseTrie::primed(x);
    let mut out = Vec::new();
    write_uint(&mut out, v.len() as u64);
    let bits = v.as_slice();
    let mut pos = 0;
    while pos < bits.len() {
        let mut cur = 0u32;
        while pos < bits.len() {
            match trie.child(cur, bits[pos]) {
                Some(next) => {
                    cur = next;
                    pos += 1;
                }
                None => break,
            }
        }
        write_uint(&mut out, cur as u64);
        if pos < bits.len() {
            // Normal token: dictionary index plus one literal bit. The walk
            // stopped because this child was missing, so the phrase is new.
            out.push(bits[pos]);
            trie.add_child(cur, bits[pos]);
            pos += 1;
        }
        // Otherwise the input ended exactly on a dictionary phrase: the
        // index alone closes the stream (the decoder sees the remaining
        // length match the phrase length).
    }
    out
}

fn decode_lz78(reader: &mut BitReader, x: &BitString) -> Result<Vec<bool>, CodecError> {
    let mut trie = PhraseTrie::primed(x);
    let len = reader.read_uint()? as usize;
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let id = reader.read_uint()?;
        if id >= trie.len() as u64 {
            return Err(CodecError::Malformed("dictionary index out of range"));
        }
        let id = id as u32;
        let depth = trie.depth[id as usize] as usize;
        if out.len() + depth == len {
            // Final index-only token.
            out.extend(trie.phrase(id));
            break;
        }
        if out.len() + depth + 1 > len {
            return Err(CodecError::Malformed("phrase overruns the declared length"));
        }
        let literal = reader.read_bit()?;
        out.extend(trie.phrase(id));
        out.push(literal);
        if trie.child(id, literal).is_some() {
            return Err(CodecError::Malformed("token repeats an existing phrase"));
        }
        trie.add_child(id, literal);
    }
    Ok(out)
}

// --- COPYREF: greedy longest-match references into the catalyst ---------

fn longest_match(v: &[bool], pos: usize, x: &[bool]) -> (usize, usize) {
    let mut best = (0usize, 0usize);
    for start in 0..x.len() {
        let mut len = 0;
        while start + len < x.len() && pos + len < v.len() && x[start + len] == v[pos + len] {
            len += 1;
        }
        if len > best.1 {
            best = (start, len);
        }
    }
    best
}

fn encode_copyref(v: &BitString, x: &BitString) -> Vec<bool> {
    let mut out = Vec::new();
    write_uint(&mut out, v.len() as u64);
    let bits = v.as_slice();
    let cat = x.as_slice();
    let mut pos = 0;
    while pos < bits.len() {
        let (offset, len) = longest_match(bits, pos, cat);
        if len >= 1 {
            let cost = 1 + uint_code_len(offset as u64) + uint_code_len(len as u64);
            if cost < 2 * len as u64 {
                out.push(true);
                write_uint(&mut out, offset as u64);
                write_uint(&mut out, len as u64);
                pos += len;
                continue;
            }
        }
        out.push(false);
        out.push(bits[pos]);
        pos += 1;
    }
    out
}

fn decode_copyref(reader: &mut BitReader, x: &BitString) -> Result<Vec<bool>, CodecError> {
    let len = reader.read_uint()? as usize;
    let cat = x.as_slice();
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        if reader.read_bit()? {
            let offset = reader.read_uint()? as usize;
            let length = reader.read_uint()? as usize;
            if length == 0 {
                return Err(CodecError::Malformed("zero-length reference"));
            }
            if offset + length > cat.len() {
                return Err(CodecError::DanglingReference {
                    offset,
                    length,
                    catalyst_len: cat.len(),
                });
            }
            if out.len() + length > len {
                return Err(CodecError::Malformed(
                    "reference overruns the declared length",
                ));
            }
            out.extend_from_slice(&cat[offset..offset + length]);
        } else {
            out.push(reader.read_bit()?);
        }
    }
    Ok(out)
}

// --- BEST ----------------------------------------------------------------

fn encode_best(v: &BitString, x: &BitString) -> Vec<bool> {
    let mut best: Option<(CodecId, Vec<bool>)> = None;
    for codec in CONCRETE_CODECS {
        let payload = match codec {
            CodecId::Raw => encode_raw(v),
            CodecId::Rle => encode_rle(v),
            CodecId::Lz78 => encode_lz78(v, x),
            CodecId::CopyRef => encode_copyref(v, x),
            CodecId::Best => unreachable!(),
        };
        if best.as_ref().is_none_or(|(_, b)| payload.len() < b.len()) {
            best = Some((codec, payload));
        }
    }
    let (codec, payload) = best.expect("codec family is nonempty");
    let mut out = Vec::with_capacity(payload.len() + 2);
    out.extend(codec.tag_bits());
    out.extend(payload);
    out
}

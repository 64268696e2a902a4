//! Bit sequences, their ±1 image, and the two on-disk formats.
//!
//! Bits are stored packed, MSB-first: bit `k` of a sequence lives in bit
//! `7 - k % 8` of byte `k / 8`. The same layout is used by the `packed`
//! file format, so writing a sequence is a plain byte copy.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite sequence of bits.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BitSequence {
    bytes: Vec<u8>,
    len: usize,
}

impl BitSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(nbits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(nbits.div_ceil(8)),
            len: 0,
        }
    }

    /// Builds a sequence from `0`/`1` values. Any nonzero byte counts as a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        bits.iter().map(|&b| b != 0).collect()
    }

    /// Wraps MSB-first packed bytes, keeping the first `nbits` bits.
    pub fn from_packed(bytes: &[u8], nbits: usize) -> Result<Self> {
        let available = bytes.len() * 8;
        if nbits > available {
            return Err(Error::InsufficientBits {
                required: nbits,
                available,
            });
        }
        let mut bytes = bytes[..nbits.div_ceil(8)].to_vec();
        if let Some(last) = bytes.last_mut() {
            let used = nbits % 8;
            if used != 0 {
                *last &= 0xffu8 << (8 - used);
            }
        }
        Ok(Self { bytes, len: nbits })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes; the trailing partial byte is zero padded.
    pub fn as_packed(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        assert!(k < self.len, "bit index {k} out of range for length {}", self.len);
        self.bytes[k / 8] >> (7 - k % 8) & 1 == 1
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let k = self.len;
            self.bytes[k / 8] |= 1 << (7 - k % 8);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `word`, most significant first.
    pub fn push_word(&mut self, word: u64, width: u32) {
        debug_assert!(width <= 64);
        for shift in (0..width).rev() {
            self.push(word >> shift & 1 == 1);
        }
    }

    pub fn extend_from(&mut self, other: &BitSequence) {
        if self.len.is_multiple_of(8) {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
        } else {
            for bit in other.iter() {
                self.push(bit);
            }
        }
    }

    /// Copies bits `start..end` into a new sequence.
    pub fn slice(&self, start: usize, end: usize) -> BitSequence {
        assert!(start <= end && end <= self.len);
        if start.is_multiple_of(8) {
            let mut out = BitSequence {
                bytes: self.bytes[start / 8..end.div_ceil(8)].to_vec(),
                len: end - start,
            };
            out.clear_padding();
            out
        } else {
            (start..end).map(|k| self.get(k)).collect()
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |k| self.get(k))
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    fn clear_padding(&mut self) {
        self.bytes.truncate(self.len.div_ceil(8));
        let used = self.len % 8;
        if used != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= 0xffu8 << (8 - used);
            }
        }
    }
}

impl FromIterator<bool> for BitSequence {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let iter = iter.into_iter();
        let mut out = BitSequence::with_capacity(iter.size_hint().0);
        for bit in iter {
            out.push(bit);
        }
        out
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 64;
        write!(f, "BitSequence(len={}, ", self.len)?;
        for bit in self.iter().take(SHOWN) {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        if self.len > SHOWN {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

/// A sequence of ±1 values, the image of a [`BitSequence`] under `x = 2e - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedSequence {
    values: Vec<i8>,
}

impl SignedSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// Overwrites position `k` with `+1` (`true`) or `-1`.
    pub(crate) fn force(&mut self, k: usize, positive: bool) {
        self.values[k] = if positive { 1 } else { -1 };
    }

    /// Sum of all values.
    pub fn sum(&self) -> i64 {
        self.values.iter().map(|&v| i64::from(v)).sum()
    }

    /// Inverse of [`to_signed`]: `e = (x + 1) / 2`.
    pub fn to_bits(&self) -> BitSequence {
        self.values.iter().map(|&v| v > 0).collect()
    }
}

/// Maps every bit `e` to `2e - 1`.
pub fn to_signed(bits: &BitSequence) -> SignedSequence {
    SignedSequence {
        values: bits.iter().map(|b| if b { 1 } else { -1 }).collect(),
    }
}

/// `m` sequences of identical even length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceSet {
    n: usize,
    sequences: Vec<BitSequence>,
}

impl SequenceSet {
    pub fn new(sequences: Vec<BitSequence>) -> Result<Self> {
        let n = sequences.first().map(BitSequence::len).ok_or(Error::EmptySet)?;
        if let Some(bad) = sequences.iter().find(|s| s.len() != n) {
            return Err(Error::Config(format!(
                "sequence set mixes lengths {n} and {}",
                bad.len()
            )));
        }
        Ok(Self { n, sequences })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.sequences.len()
    }

    pub fn sequences(&self) -> &[BitSequence] {
        &self.sequences
    }
}

/// Splits `stream` into `m` consecutive windows of `n` bits each.
///
/// Bits past `n * m` are dropped.
pub fn partition(stream: &BitSequence, n: usize, m: usize) -> Result<SequenceSet> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    if n == 0 || m == 0 {
        return Err(Error::Config("partition needs n > 0 and m > 0".into()));
    }
    let required = n
        .checked_mul(m)
        .ok_or_else(|| Error::Config("n * m overflows".into()))?;
    if stream.len() < required {
        return Err(Error::InsufficientBits {
            required,
            available: stream.len(),
        });
    }
    let sequences = (0..m).map(|i| stream.slice(i * n, (i + 1) * n)).collect();
    SequenceSet::new(sequences)
}

/// On-disk representation of a bit sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitFormat {
    /// ASCII `'0'`/`'1'` characters; whitespace is ignored.
    Ascii01,
    /// Raw bytes, MSB-first, final byte zero padded.
    Packed,
}

impl FromStr for BitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii01" | "ascii" => Ok(Self::Ascii01),
            "packed" | "bin" => Ok(Self::Packed),
            other => Err(Error::Config(format!("unknown bit format `{other}`"))),
        }
    }
}

impl fmt::Display for BitFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Self::Ascii01 => "ascii01",
            Self::Packed => "packed",
        })
    }
}

pub fn parse_ascii01(text: &[u8]) -> Result<BitSequence> {
    let mut out = BitSequence::with_capacity(text.len());
    for (offset, &byte) in text.iter().enumerate() {
        match byte {
            b'0' => out.push(false),
            b'1' => out.push(true),
            b if b.is_ascii_whitespace() => {}
            b => {
                return Err(Error::Format(format!(
                    "byte 0x{b:02x} at offset {offset} is not '0', '1' or whitespace"
                )))
            }
        }
    }
    Ok(out)
}

/// Reads a whole file. For `packed` input, `nbits` limits how many bits are
/// kept (the format carries no length header); `None` keeps every bit.
pub fn read_bits(path: impl AsRef<Path>, format: BitFormat, nbits: Option<usize>) -> Result<BitSequence> {
    let raw = fs::read(path)?;
    let bits = match format {
        BitFormat::Ascii01 => parse_ascii01(&raw)?,
        BitFormat::Packed => BitSequence::from_packed(&raw, nbits.unwrap_or(raw.len() * 8))?,
    };
    match nbits {
        Some(limit) if limit < bits.len() => Ok(bits.slice(0, limit)),
        Some(limit) if limit > bits.len() => Err(Error::InsufficientBits {
            required: limit,
            available: bits.len(),
        }),
        _ => Ok(bits),
    }
}

pub fn write_bits(seq: &BitSequence, path: impl AsRef<Path>, format: BitFormat) -> Result<()> {
    match format {
        BitFormat::Packed => fs::write(path, seq.as_packed())?,
        BitFormat::Ascii01 => {
            let text: Vec<u8> = seq.iter().map(|b| if b { b'1' } else { b'0' }).collect();
            fs::write(path, text)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_mapping() {
        let e = BitSequence::from_bits(&[0, 1, 1, 0]);
        assert_eq!(to_signed(&e).values(), &[-1, 1, 1, -1]);
        assert!(to_signed(&BitSequence::from_bits(&[0; 8]))
            .values()
            .iter()
            .all(|&v| v == -1));
        assert!(to_signed(&BitSequence::from_bits(&[1; 8]))
            .values()
            .iter()
            .all(|&v| v == 1));
    }

    #[test]
    fn partition_windows() {
        let stream = BitSequence::from_bits(&[1, 0, 0, 1, 1, 1, 0, 0, 1, 1]);
        let set = partition(&stream, 4, 2).unwrap();
        assert_eq!(set.m(), 2);
        assert_eq!(set.sequences()[0], BitSequence::from_bits(&[1, 0, 0, 1]));
        assert_eq!(set.sequences()[1], BitSequence::from_bits(&[1, 1, 0, 0]));

        let exact = partition(&stream.slice(0, 8), 4, 2).unwrap();
        assert_eq!(exact, set);
    }

    #[test]
    fn partition_errors() {
        let stream = BitSequence::from_bits(&[0; 7]);
        assert!(matches!(
            partition(&stream, 4, 2),
            Err(Error::InsufficientBits {
                required: 8,
                available: 7
            })
        ));
        assert!(matches!(partition(&stream, 3, 2), Err(Error::OddLength(3))));
    }

    #[test]
    fn ascii_parsing() {
        let bits = parse_ascii01(b"01\n1 0\t").unwrap();
        assert_eq!(bits, BitSequence::from_bits(&[0, 1, 1, 0]));
        assert!(matches!(parse_ascii01(b"0120"), Err(Error::Format(_))));
    }

    #[test]
    fn packed_msb_first() {
        let bits = BitSequence::from_packed(&[0xB4], 4).unwrap();
        assert_eq!(bits, BitSequence::from_bits(&[1, 0, 1, 1]));
        assert_eq!(bits.as_packed(), &[0xB0]);
        assert!(BitSequence::from_packed(&[0xB4], 9).is_err());
    }

    #[test]
    fn push_word_and_slice() {
        let mut seq = BitSequence::new();
        seq.push_word(0b101, 3);
        seq.push_word(0xF0, 8);
        assert_eq!(seq.len(), 11);
        assert_eq!(seq.slice(3, 11).as_packed(), &[0xF0]);
        assert_eq!(seq.slice(0, 3), BitSequence::from_bits(&[1, 0, 1]));
        assert_eq!(seq.slice(8, 11), BitSequence::from_bits(&[0, 0, 0]));
    }
}

//! Fixed-length bit vectors.
//!
//! Bit `i` of a `BitString` built from an integer `u` is `(u >> i) & 1`, i.e.
//! index 0 is the least significant bit, matching the `u_0 ... u_(B-1)`
//! numbering of a `B`-bit code.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum BitsError {
    #[error("value needs {needed} bits but the vector holds {len}")]
    Overflow { needed: u64, len: usize },
    #[error("invalid bit character {0:?}")]
    InvalidChar(char),
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// The `len` low bits of `value`; fails if `value` needs more.
    pub fn from_biguint(value: &BigUint, len: usize) -> Result<Self, BitsError> {
        if value.bits() > len as u64 {
            return Err(BitsError::Overflow {
                needed: value.bits(),
                len,
            });
        }
        let mut words = value.to_u64_digits();
        words.resize(len.div_ceil(64), 0);
        Ok(Self { len, words })
    }

    /// Takes bits LSB-first from each byte, byte 0 first. Extra input bits are
    /// dropped.
    pub fn from_le_bytes(bytes: &[u8], len: usize) -> Self {
        let mut out = Self::zeros(len);
        for i in 0..len.min(bytes.len() * 8) {
            if (bytes[i / 8] >> (i % 8)) & 1 == 1 {
                out.set(i, true);
            }
        }
        out
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    pub fn to_biguint(&self) -> BigUint {
        let mut bytes = Vec::with_capacity(self.words.len() * 8);
        for w in &self.words {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        BigUint::from_bytes_le(&bytes)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, bit: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        let mask = 1u64 << (index % 64);
        if bit {
            self.words[index / 64] |= mask;
        } else {
            self.words[index / 64] &= !mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Elementwise exclusive or; `None` on length mismatch.
    pub fn xor(&self, other: &Self) -> Option<Self> {
        if self.len != other.len {
            return None;
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Some(Self {
            len: self.len,
            words,
        })
    }

    pub fn hamming_distance(&self, other: &Self) -> Option<u32> {
        self.xor(other).map(|d| d.count_ones())
    }

    /// First `len` bits.
    pub fn truncated(&self, len: usize) -> Self {
        assert!(len <= self.len);
        let mut out = Self::zeros(len);
        for i in 0..len {
            out.set(i, self.get(i));
        }
        out
    }
}

impl fmt::Display for BitString {
    /// Bits in index order, `u_0` first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    /// Parses `'0'`/`'1'` characters in index order.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitsError::InvalidChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bools(&bits))
    }
}

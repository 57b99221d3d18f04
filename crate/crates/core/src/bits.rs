//! Packed bit vectors.
//!
//! Text form is one ASCII `'0'`/`'1'` per bit, character `k` holding bit `k`.
//! When a string of at most 64 bits is used as a point of the Boolean cube,
//! bit `k` becomes bit `k` of the integer index (least significant first).

use std::fmt;
use std::str::FromStr;

use crate::error::{dim_check, Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = BitString {
            len,
            words: vec![u64::MAX; len.div_ceil(WORD)],
        };
        b.clear_tail();
        b
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut b = BitString::zeros(bits.len());
        for (i, v) in bits.into_iter().enumerate() {
            b.set(i, v);
        }
        b
    }

    /// Builds a string of `len ≤ 64` bits from the low bits of `index`.
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= WORD, "from_index supports at most 64 bits");
        let mut b = BitString::zeros(len);
        if len > 0 {
            b.words[0] = index;
            b.clear_tail();
        }
        b
    }

    /// Inverse of [`BitString::from_index`]; fails above 64 bits.
    pub fn to_index(&self) -> Result<u64> {
        if self.len > WORD {
            return Err(Error::Domain(format!(
                "{}-bit string does not fit a cube index",
                self.len
            )));
        }
        Ok(self.words.first().copied().unwrap_or(0))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if v {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.get(i);
        self.set(i, !v);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        dim_check("xor operand length", self.len, other.len)?;
        Ok(BitString {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    pub fn complement(&self) -> BitString {
        let mut b = BitString {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        b.clear_tail();
        b
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitString) -> Result<bool> {
        dim_check("dot operand length", self.len, other.len)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut b = BitString::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => b.set(i, true),
                other => {
                    return Err(Error::Parse(format!(
                        "invalid bit character {other:?} at position {i}"
                    )))
                }
            }
        }
        Ok(b)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.iter() {
            f.write_str(if v { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Renders the low `len` bits of a cube index as text.
pub fn index_to_string(index: u64, len: usize) -> String {
    (0..len)
        .map(|i| if (index >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

//! Packed bit vectors, 64 bits per word, bit `i` at word `i / 64`, position `i % 64`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if f(i) {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of ASCII `'0'`/`'1'`; whitespace is ignored.
    pub fn from_ascii(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "unexpected character {other:?} in bit string"
                ))),
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_fn(bits.len(), |i| bits[i]))
    }

    pub fn to_ascii(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Little-endian bytes: byte `k` bit `m` holds bit `8k + m`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        self.words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(nbytes)
            .collect()
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Parse(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let mut v = Self::zeros(len);
        for (k, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            v.words[k] = u64::from_le_bytes(buf);
        }
        if v.words
            .last()
            .is_some_and(|&w| len % 64 != 0 && w >> (len % 64) != 0)
        {
            return Err(Error::Parse("nonzero padding bits past the end".into()));
        }
        Ok(v)
    }

    fn clear_tail(&mut self) {
        if self.len % 64 != 0 {
            if let Some(w) = self.words.last_mut() {
                *w &= (1u64 << (self.len % 64)) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions of the set bits, ascending.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }

    /// The same bits in reverse order.
    pub fn reversed(&self) -> Self {
        Self::from_fn(self.len, |i| self.get(self.len - 1 - i))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({})", self.to_ascii())
    }
}

/// 64 bits of `src` starting at bit `offset`; bits past the end read as zero.
#[inline]
pub(crate) fn word_at(src: &[u64], offset: usize) -> u64 {
    let k = offset / 64;
    let s = offset % 64;
    let lo = src.get(k).copied().unwrap_or(0);
    if s == 0 {
        lo
    } else {
        let hi = src.get(k + 1).copied().unwrap_or(0);
        (lo >> s) | (hi << (64 - s))
    }
}

/// `dst ^= src << shift`, truncated to `dst`'s length.
pub(crate) fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let k = shift / 64;
    let s = shift % 64;
    if s == 0 {
        for (d, &w) in dst.iter_mut().skip(k).zip(src) {
            *d ^= w;
        }
    } else {
        let mut carry = 0u64;
        for (idx, &w) in src.iter().enumerate() {
            if let Some(d) = dst.get_mut(idx + k) {
                *d ^= (w << s) | carry;
            } else {
                return;
            }
            carry = w >> (64 - s);
        }
        if let Some(d) = dst.get_mut(src.len() + k) {
            *d ^= carry;
        }
    }
}

//! Fixed-width bitstrings.
//!
//! Bit order is most-significant-first everywhere: `BitString::from_u64(5, 4)`
//! is `0101` and round-trips through [`BitString::to_u64`].

use std::fmt;

/// An immutable-ish sequence of bits. Actions, commitment strings, keys and
/// randomness prefixes are all `BitString`s.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        BitString { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    /// The low `width` bits of `value`, most significant first.
    pub fn from_u64(value: u64, width: usize) -> Self {
        assert!(width <= 64, "width {width} exceeds 64");
        let bits = (0..width).map(|i| value >> (width - 1 - i) & 1 == 1).collect();
        BitString { bits }
    }

    pub fn zeros(width: usize) -> Self {
        BitString { bits: vec![false; width] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn push(&mut self, b: bool) {
        self.bits.push(b);
    }

    pub fn extend(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString { bits: self.bits[start..end].to_vec() }
    }

    /// Interpret the whole string as an unsigned integer (MSB first).
    pub fn to_u64(&self) -> u64 {
        assert!(self.len() <= 64, "bitstring of length {} exceeds u64", self.len());
        self.bits.iter().fold(0, |acc, &b| acc << 1 | b as u64)
    }

    /// Copy with the final bit flipped; used for "spoil the key" actions.
    pub fn with_last_bit_flipped(&self) -> BitString {
        let mut bits = self.bits.clone();
        if let Some(last) = bits.last_mut() {
            *last = !*last;
        }
        BitString { bits }
    }

    pub fn all_zero(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    /// Lowercase hex, left-padded with zero bits to a nibble boundary.
    pub fn to_hex(&self) -> String {
        let pad = (4 - self.len() % 4) % 4;
        let mut out = String::with_capacity((self.len() + pad) / 4);
        let mut nibble = 0u8;
        let mut count = 0;
        for b in std::iter::repeat(false).take(pad).chain(self.iter()) {
            nibble = nibble << 1 | b as u8;
            count += 1;
            if count == 4 {
                out.push(char::from_digit(nibble as u32, 16).unwrap());
                nibble = 0;
                count = 0;
            }
        }
        out
    }

    /// Parse hex back into exactly `width` bits (inverse of [`to_hex`](Self::to_hex)).
    pub fn from_hex(s: &str, width: usize) -> Option<BitString> {
        let mut bits = Vec::with_capacity(s.len() * 4);
        for c in s.chars() {
            let v = c.to_digit(16)? as u8;
            for i in (0..4).rev() {
                bits.push(v >> i & 1 == 1);
            }
        }
        if bits.len() < width || bits[..bits.len() - width].iter().any(|&b| b) {
            return None;
        }
        Some(BitString { bits: bits[bits.len() - width..].to_vec() })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{}", *b as u8)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b\"{self}\"")
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<T: IntoIterator<Item = bool>>(iter: T) -> Self {
        BitString { bits: iter.into_iter().collect() }
    }
}

/// Anything that yields fresh or replayed bits. Live randomness tapes and
/// replay readers over a consumed prefix both implement this, so sampling
/// logic can be written once and reused for reconstruction.
pub trait BitSource {
    fn take_bit(&mut self) -> bool;

    fn take(&mut self, n: usize) -> BitString {
        (0..n).map(|_| self.take_bit()).collect()
    }
}

/// Replays a previously recorded bit prefix. Running past the end is a logic
/// error in the caller's reconstruction and panics.
pub struct BitReader<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        BitReader { bits, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

impl BitSource for BitReader<'_> {
    fn take_bit(&mut self) -> bool {
        let b = self.bits.bit(self.pos);
        self.pos += 1;
        b
    }
}

/// Concatenate the actions of a history into one bitstring (views are
/// serialized this way before being handed to distinguishers).
pub fn flatten(actions: &[BitString]) -> BitString {
    let mut out = BitString::new();
    for a in actions {
        out.extend(a);
    }
    out
}

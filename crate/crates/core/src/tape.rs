//! Explicit randomness tapes.
//!
//! Machines consume randomness left-to-right from a per-player tape; the
//! consumed prefix is recorded so a stateful machine's later activations can
//! reconstruct earlier draws by replaying it.

use num::{BigUint, ToPrimitive};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{BitSource, BitString};
use crate::Rational;

/// A lazily extended random bit tape, deterministic in its seed.
pub struct RandomTape {
    rng: ChaCha8Rng,
    word: u64,
    word_bits: u32,
    consumed: BitString,
}

impl RandomTape {
    pub fn new(seed: u64) -> Self {
        RandomTape {
            rng: ChaCha8Rng::seed_from_u64(seed),
            word: 0,
            word_bits: 0,
            consumed: BitString::new(),
        }
    }

    /// Everything drawn so far, in draw order.
    pub fn consumed(&self) -> &BitString {
        &self.consumed
    }

    pub fn consumed_len(&self) -> usize {
        self.consumed.len()
    }
}

impl BitSource for RandomTape {
    fn take_bit(&mut self) -> bool {
        if self.word_bits == 0 {
            self.word = self.rng.next_u64();
            self.word_bits = 64;
        }
        let b = self.word & 1 == 1;
        self.word >>= 1;
        self.word_bits -= 1;
        self.consumed.push(b);
        b
    }
}

/// Uniform value in `0..bound` by rejection over `ceil(log2 bound)` bits.
pub fn sample_below(src: &mut dyn BitSource, bound: u64) -> u64 {
    assert!(bound > 0);
    if bound == 1 {
        return 0;
    }
    let width = 64 - (bound - 1).leading_zeros() as usize;
    loop {
        let v = src.take(width).to_u64();
        if v < bound {
            return v;
        }
    }
}

/// Draw an index with exact rational probabilities. `weights` must be
/// nonnegative and sum to 1; the common denominator must fit in a `u64`.
pub fn sample_index(src: &mut dyn BitSource, weights: &[Rational]) -> usize {
    let mut denom = BigUint::from(1u32);
    for w in weights {
        denom = num::integer::lcm(denom, w.denom().magnitude().clone());
    }
    let denom = denom.to_u64().expect("sampling denominator exceeds u64");
    let scaled: Vec<u64> = weights
        .iter()
        .map(|w| {
            let num = w.numer().magnitude() * denom / w.denom().magnitude();
            num.to_u64().expect("scaled weight exceeds u64")
        })
        .collect();
    debug_assert_eq!(scaled.iter().sum::<u64>(), denom, "weights must sum to 1");
    let v = sample_below(src, denom);
    let mut acc = 0;
    for (i, w) in scaled.iter().enumerate() {
        acc += w;
        if v < acc {
            return i;
        }
    }
    unreachable!("weight mass exhausted")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitReader;

    #[test]
    fn tape_is_deterministic_and_records() {
        let mut a = RandomTape::new(7);
        let mut b = RandomTape::new(7);
        let xa = a.take(100);
        let xb = b.take(100);
        assert_eq!(xa, xb);
        assert_eq!(a.consumed(), &xa);
    }

    #[test]
    fn replay_reproduces_draws() {
        let mut tape = RandomTape::new(3);
        let w = vec![Rational::new(1.into(), 3.into()), Rational::new(2.into(), 3.into())];
        let first = sample_index(&mut tape, &w);
        let snapshot = tape.consumed().clone();
        let mut reader = BitReader::new(&snapshot);
        assert_eq!(sample_index(&mut reader, &w), first);
    }

    #[test]
    fn sample_below_is_in_range_and_covers() {
        let mut tape = RandomTape::new(11);
        let mut seen = [false; 5];
        for _ in 0..200 {
            seen[sample_below(&mut tape, 5) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn sample_index_frequencies() {
        let w = vec![Rational::new(1.into(), 4.into()), Rational::new(3.into(), 4.into())];
        let mut tape = RandomTape::new(5);
        let mut hits = [0u32; 2];
        for _ in 0..4000 {
            hits[sample_index(&mut tape, &w)] += 1;
        }
        let f = hits[0] as f64 / 4000.0;
        assert!((f - 0.25).abs() < 0.03, "freq {f}");
    }
}

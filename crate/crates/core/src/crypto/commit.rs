//! Bit commitment over the ideal permutation.
//!
//! `commit` draws a `k-1`-bit key from the randomness tape and outputs the
//! `k`-bit commitment string `perm(key || b)`; the key is the opening
//! information. Binding is perfect (the permutation is injective), and a
//! `q`-query party's advantage at guessing the committed bit is at most
//! `q / 2^(k-1)` because each query tests at most one candidate key.

use num::BigInt;

use super::perm::Oracle;
use super::CryptoError;
use crate::bits::{BitSource, BitString};
use crate::Rational;

/// A commitment string plus the key that opens it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commitment {
    pub width: u8,
    /// `width` bits, published.
    pub string: BitString,
    /// `width - 1` bits, kept by the committer.
    pub key: BitString,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reveal {
    Bit(bool),
    Fail,
}

fn check_width(k: u8) -> Result<(), CryptoError> {
    if k < 2 || k > 64 {
        return Err(CryptoError::BadWidth(k));
    }
    Ok(())
}

/// Commit to `bit` at width `k`, consuming `k-1` key bits from `r`.
/// Charges one forward query.
pub fn commit(
    oracle: &mut Oracle,
    k: u8,
    bit: bool,
    r: &mut dyn BitSource,
) -> Result<Commitment, CryptoError> {
    check_width(k)?;
    let key = r.take(k as usize - 1);
    let point = key.to_u64() << 1 | bit as u64;
    let image = oracle.forward(k, point)?;
    Ok(Commitment { width: k, string: BitString::from_u64(image, k as usize), key })
}

/// Receiver algorithm: open commitment string `c` with claimed key `s`.
/// Computes the permutation preimage of `c` (one inverse query, charged to
/// the caller's meter) and returns the committed bit iff the key matches.
/// Callers only ever see `Bit`/`Fail`, never the true key.
pub fn reveal(
    oracle: &mut Oracle,
    c: &BitString,
    s: &BitString,
) -> Result<Reveal, CryptoError> {
    let k = c.len() as u8;
    check_width(k)?;
    if s.len() != k as usize - 1 {
        return Err(CryptoError::BadLength { expected: k as usize - 1, got: s.len() });
    }
    oracle.meter.charge(1)?;
    let point = oracle.table.inverse(k, c.to_u64());
    let key = point >> 1;
    let bit = point & 1 == 1;
    if key == s.to_u64() {
        Ok(Reveal::Bit(bit))
    } else {
        Ok(Reveal::Fail)
    }
}

/// Commit to each bit of `s` independently (fresh key per position).
pub fn commit_string(
    oracle: &mut Oracle,
    k: u8,
    s: &BitString,
    r: &mut dyn BitSource,
) -> Result<Vec<Commitment>, CryptoError> {
    s.iter().map(|b| commit(oracle, k, b, r)).collect()
}

/// Verifier-side: the bit a commitment string binds to, and its key.
/// Well-defined for every `k`-bit string because the permutation is total.
pub fn committed_bit(table: &mut super::PermTable, c: &BitString) -> (BitString, bool) {
    let k = c.len() as u8;
    let point = table.inverse(k, c.to_u64());
    (BitString::from_u64(point >> 1, k as usize - 1), point & 1 == 1)
}

/// Analytic ceiling on the advantage of any `q`-query bounded party at
/// distinguishing commitments to 0 from commitments to 1 at width `k`.
pub fn hiding_advantage_bound(k: u8, q: u64) -> Rational {
    let denom = BigInt::from(1u8) << (k as usize - 1);
    let bound = Rational::new(BigInt::from(q), denom);
    bound.min(Rational::from_integer(1.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{PermTable, QueryMeter};
    use crate::tape::RandomTape;

    fn oracle_pair(seed: u64) -> (PermTable, QueryMeter) {
        (PermTable::new(seed), QueryMeter::unbounded())
    }

    #[test]
    fn reveal_round_trip() {
        let (mut t, mut m) = oracle_pair(1);
        let mut tape = RandomTape::new(2);
        for bit in [false, true] {
            let c = commit(&mut Oracle::new(&mut t, &mut m), 12, bit, &mut tape).unwrap();
            let got = reveal(&mut Oracle::new(&mut t, &mut m), &c.string, &c.key).unwrap();
            assert_eq!(got, Reveal::Bit(bit));
        }
    }

    #[test]
    fn wrong_key_fails() {
        let (mut t, mut m) = oracle_pair(3);
        let mut tape = RandomTape::new(4);
        let c = commit(&mut Oracle::new(&mut t, &mut m), 10, true, &mut tape).unwrap();
        let bad = c.key.with_last_bit_flipped();
        let got = reveal(&mut Oracle::new(&mut t, &mut m), &c.string, &bad).unwrap();
        assert_eq!(got, Reveal::Fail);
    }

    #[test]
    fn reveal_total_on_arbitrary_strings() {
        let (mut t, mut m) = oracle_pair(9);
        let c = BitString::from_u64(0b101010, 6);
        let s = BitString::from_u64(0, 5);
        // Never errors: the permutation lazily defines a preimage.
        reveal(&mut Oracle::new(&mut t, &mut m), &c, &s).unwrap();
    }

    #[test]
    fn perfect_binding_exhaustive_small_widths() {
        // Every commitment string opens to exactly one (key, bit) pair:
        // enumerate all points and check images are distinct, so no string
        // can reveal both a 0 and a 1.
        for k in [2u8, 4, 6, 8] {
            let mut t = PermTable::new(100 + k as u64);
            let mut images = std::collections::HashSet::new();
            for point in 0..1u64 << k {
                assert!(images.insert(t.forward(k, point)), "collision at width {k}");
            }
        }
    }

    #[test]
    fn tape_consumption_is_recorded() {
        let (mut t, mut m) = oracle_pair(5);
        let mut tape = RandomTape::new(6);
        commit(&mut Oracle::new(&mut t, &mut m), 33, false, &mut tape).unwrap();
        assert_eq!(tape.consumed_len(), 32);
    }

    #[test]
    fn bound_values() {
        assert_eq!(hiding_advantage_bound(32, 1 << 10), Rational::new(1.into(), BigInt::from(1u64 << 21)));
        assert_eq!(hiding_advantage_bound(10, 1 << 9), Rational::from_integer(1.into()));
    }

    #[test]
    fn determinism_across_processes() {
        let run = || {
            let (mut t, mut m) = oracle_pair(77);
            let mut tape = RandomTape::new(78);
            let c = commit(&mut Oracle::new(&mut t, &mut m), 16, true, &mut tape).unwrap();
            (c.string.to_hex(), c.key.to_hex())
        };
        assert_eq!(run(), run());
    }
}

//! Lazily sampled ideal permutations with per-caller query budgets.

use std::collections::{BTreeMap, HashMap};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CryptoError;
use crate::seeding;

/// One lazily sampled bijection per bit width. Unqueried points do not
/// exist yet; a fresh query draws a uniform unused value from a seeded
/// generator and records it in both direction maps.
///
/// Instances are deterministic in `(seed, query order)`. Experiments give
/// each trial its own table (derived seed), so replays are bit-identical.
pub struct PermTable {
    seed: u64,
    widths: BTreeMap<u8, Slot>,
}

struct Slot {
    fwd: HashMap<u64, u64>,
    inv: HashMap<u64, u64>,
    rng: ChaCha8Rng,
}

const MAX_WIDTH: u8 = 64;

fn mask(width: u8) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl PermTable {
    pub fn new(seed: u64) -> Self {
        PermTable { seed, widths: BTreeMap::new() }
    }

    fn slot(&mut self, width: u8) -> &mut Slot {
        assert!(width >= 1 && width <= MAX_WIDTH, "permutation width {width} out of range");
        let seed = seeding::derive(self.seed, width as u64);
        self.widths.entry(width).or_insert_with(|| Slot {
            fwd: HashMap::new(),
            inv: HashMap::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Forward query. Trusted interface: no budget.
    pub fn forward(&mut self, width: u8, x: u64) -> u64 {
        let m = mask(width);
        debug_assert_eq!(x & m, x, "point wider than the permutation");
        let slot = self.slot(width);
        if let Some(&y) = slot.fwd.get(&x) {
            return y;
        }
        let y = fresh(&mut slot.rng, &slot.inv, width);
        slot.fwd.insert(x, y);
        slot.inv.insert(y, x);
        y
    }

    /// Inverse query. Trusted, verifier-side interface: history maps and
    /// utility evaluation may call it, bounded parties may not.
    pub fn inverse(&mut self, width: u8, y: u64) -> u64 {
        let m = mask(width);
        debug_assert_eq!(y & m, y, "point wider than the permutation");
        let slot = self.slot(width);
        if let Some(&x) = slot.inv.get(&y) {
            return x;
        }
        let x = fresh(&mut slot.rng, &slot.fwd, width);
        slot.inv.insert(y, x);
        slot.fwd.insert(x, y);
        x
    }

    /// Number of sampled points at a width (test/diagnostic hook).
    pub fn sampled(&self, width: u8) -> usize {
        self.widths.get(&width).map_or(0, |s| s.fwd.len())
    }
}

/// Uniform value not yet present in `used`. Rejection sampling; for narrow,
/// nearly full widths it falls back to an explicit scan so termination never
/// depends on luck.
fn fresh(rng: &mut ChaCha8Rng, used: &HashMap<u64, u64>, width: u8) -> u64 {
    let m = mask(width);
    for _ in 0..(64 + 4 * width as usize) {
        let y = rng.next_u64() & m;
        if !used.contains_key(&y) {
            return y;
        }
    }
    assert!(width <= 24, "rejection sampling shouldn't saturate at width {width}");
    let free: Vec<u64> = (0..=m).filter(|y| !used.contains_key(y)).collect();
    assert!(!free.is_empty(), "permutation domain exhausted");
    free[(rng.next_u64() % free.len() as u64) as usize]
}

/// Counts queries against an optional budget.
#[derive(Debug, Clone, Default)]
pub struct QueryMeter {
    used: u64,
    budget: Option<u64>,
}

impl QueryMeter {
    pub fn unbounded() -> Self {
        QueryMeter { used: 0, budget: None }
    }

    pub fn with_budget(budget: u64) -> Self {
        QueryMeter { used: 0, budget: Some(budget) }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn charge(&mut self, q: u64) -> Result<(), CryptoError> {
        if let Some(b) = self.budget {
            if self.used + q > b {
                return Err(CryptoError::BudgetExceeded);
            }
        }
        self.used += q;
        Ok(())
    }
}

/// What a bounded party holds: metered forward access to the permutation.
/// Raw inverse queries are deliberately absent; the scheme-level receiver
/// algorithm [`super::reveal`] performs its one inverse query internally.
pub struct Oracle<'a> {
    pub(super) table: &'a mut PermTable,
    pub(super) meter: &'a mut QueryMeter,
}

impl<'a> Oracle<'a> {
    pub fn new(table: &'a mut PermTable, meter: &'a mut QueryMeter) -> Self {
        Oracle { table, meter }
    }

    pub fn forward(&mut self, width: u8, x: u64) -> Result<u64, CryptoError> {
        self.meter.charge(1)?;
        Ok(self.table.forward(width, x))
    }

    pub fn queries_used(&self) -> u64 {
        self.meter.used()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn is_a_bijection_exhaustively() {
        for width in [1u8, 2, 5, 8] {
            let mut t = PermTable::new(99);
            let n = 1u64 << width;
            let images: HashSet<u64> = (0..n).map(|x| t.forward(width, x)).collect();
            assert_eq!(images.len() as u64, n, "width {width} not injective");
            for x in 0..n {
                let y = t.forward(width, x);
                assert_eq!(t.inverse(width, y), x);
            }
        }
    }

    #[test]
    fn inverse_first_then_forward_agrees() {
        let mut t = PermTable::new(5);
        let x = t.inverse(16, 0x1234);
        assert_eq!(t.forward(16, x), 0x1234);
    }

    #[test]
    fn same_seed_same_queries_same_table() {
        let mut a = PermTable::new(1);
        let mut b = PermTable::new(1);
        for x in [3u64, 9, 200, 3] {
            assert_eq!(a.forward(10, x), b.forward(10, x));
        }
        let mut c = PermTable::new(2);
        assert_ne!(
            (0..16).map(|x| c.forward(10, x)).collect::<Vec<_>>(),
            (0..16).map(|x| a.forward(10, x)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn meter_blocks_at_budget() {
        let mut t = PermTable::new(0);
        let mut m = QueryMeter::with_budget(2);
        let mut o = Oracle::new(&mut t, &mut m);
        assert!(o.forward(8, 1).is_ok());
        assert!(o.forward(8, 2).is_ok());
        assert_eq!(o.forward(8, 3), Err(CryptoError::BudgetExceeded));
        assert_eq!(m.used(), 2);
    }
}

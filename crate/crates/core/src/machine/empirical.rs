//! Empirical outcome distributions from repeated runs.
//!
//! Trials are embarrassingly parallel: each gets its own seed from the
//! published derivation chain and its own permutation instance, and the
//! aggregate is a pure count, so results are identical whatever the thread
//! count or scheduling.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bits::BitString;
use crate::seeding::{derive, tags};

use super::family::GameFamily;
use super::runner::{run_game, ForfeitReason, Machine, Outcome};

/// Counted outcomes over an ordered key type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDistribution<K: Ord> {
    counts: BTreeMap<K, u64>,
    trials: u64,
}

impl<K: Ord + Clone> EmpiricalDistribution<K> {
    pub fn new() -> Self {
        EmpiricalDistribution { counts: BTreeMap::new(), trials: 0 }
    }

    pub fn record(&mut self, key: K) {
        *self.counts.entry(key).or_insert(0) += 1;
        self.trials += 1;
    }

    /// Total observations, including every recorded key.
    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn count(&self, key: &K) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn frequency(&self, key: &K) -> f64 {
        assert!(self.trials > 0, "empty empirical distribution");
        self.count(key) as f64 / self.trials as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, u64)> {
        self.counts.iter().map(|(k, &c)| (k, c))
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.counts.keys()
    }

    /// Rebin under a key map, preserving total mass.
    pub fn map_keys<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> J) -> EmpiricalDistribution<J> {
        let mut out = EmpiricalDistribution::new();
        for (k, c) in &self.counts {
            *out.counts.entry(f(k)).or_insert(0) += c;
        }
        out.trials = self.trials;
        out
    }

    /// L1 distance between the two frequency vectors, over the union of
    /// supports. Both sides must be nonempty.
    pub fn l1(&self, other: &Self) -> f64 {
        assert!(self.trials > 0 && other.trials > 0, "empty empirical distribution");
        let mut keys: Vec<&K> = self.counts.keys().collect();
        keys.extend(other.counts.keys());
        keys.sort();
        keys.dedup();
        keys.iter().map(|k| (self.frequency(k) - other.frequency(k)).abs()).sum()
    }
}

impl<K: Ord + Clone> Default for EmpiricalDistribution<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone> FromIterator<K> for EmpiricalDistribution<K> {
    fn from_iter<I: IntoIterator<Item = K>>(iter: I) -> Self {
        let mut d = EmpiricalDistribution::new();
        for k in iter {
            d.record(k);
        }
        d
    }
}

/// Estimated outcome distribution of a machine profile, with forfeits
/// counted separately from clean terminal histories.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiEstimate {
    pub outcomes: EmpiricalDistribution<Vec<BitString>>,
    pub forfeits: BTreeMap<(usize, &'static str), u64>,
    pub trials: u64,
}

impl PsiEstimate {
    pub fn forfeit_count(&self) -> u64 {
        self.forfeits.values().sum()
    }

    pub fn clean_trials(&self) -> u64 {
        self.trials - self.forfeit_count()
    }
}

fn reason_label(r: ForfeitReason) -> &'static str {
    match r {
        ForfeitReason::IllegalAction => "illegal-action",
        ForfeitReason::QueryBudget => "query-budget",
        ForfeitReason::StepBudget => "step-budget",
    }
}

/// Seed for trial `t` of a stream rooted at `stream_seed` (typically already
/// experiment- and size-scoped).
pub fn stream_trial_seed(stream_seed: u64, t: u64) -> u64 {
    derive(stream_seed, tags::TRIAL ^ crate::seeding::mix64(t))
}

/// Run `trials` independent games and tally terminal histories.
pub fn empirical_psi(
    family: &dyn GameFamily,
    n: u32,
    profile: &[&dyn Machine],
    trials: u64,
    stream_seed: u64,
) -> PsiEstimate {
    enum TrialResult {
        Terminal(Vec<BitString>),
        Forfeit(usize, ForfeitReason),
    }

    let results: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let transcript = run_game(family, n, profile, stream_trial_seed(stream_seed, t));
            match transcript.outcome {
                Outcome::Terminal { history, .. } => TrialResult::Terminal(history),
                Outcome::Forfeit { offender, reason, .. } => TrialResult::Forfeit(offender, reason),
            }
        })
        .collect();

    let mut outcomes = EmpiricalDistribution::new();
    let mut forfeits = BTreeMap::new();
    for r in results {
        match r {
            TrialResult::Terminal(h) => outcomes.record(h),
            TrialResult::Forfeit(p, reason) => {
                *forfeits.entry((p, reason_label(reason))).or_insert(0) += 1;
            }
        }
    }
    PsiEstimate { outcomes, forfeits, trials }
}

/// Mean utility per player over `trials` runs, forfeit payoffs included,
/// computed exactly and then rounded once.
pub fn empirical_utilities(
    family: &dyn GameFamily,
    n: u32,
    profile: &[&dyn Machine],
    trials: u64,
    stream_seed: u64,
) -> Vec<f64> {
    use num::{BigRational, ToPrimitive, Zero};

    let players = family.num_players();
    let sums: Vec<BigRational> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let transcript = run_game(family, n, profile, stream_trial_seed(stream_seed, t));
            transcript.outcome.utilities().to_vec()
        })
        .reduce(
            || vec![BigRational::zero(); players],
            |mut acc, u| {
                for (a, x) in acc.iter_mut().zip(u) {
                    *a += x;
                }
                acc
            },
        );
    let t = BigRational::from_integer(trials.into());
    sums.iter().map(|s| (s / &t).to_f64().expect("mean utility fits in f64")).collect()
}

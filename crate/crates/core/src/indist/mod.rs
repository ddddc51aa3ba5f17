//! Bounded distinguishers and statistical indistinguishability checks.
//!
//! A distinguisher is a deterministic decision rule over a sample bitstring
//! that may spend a bounded number of forward permutation queries. Advantage
//! against a pair of samplers is estimated by two independent Monte Carlo
//! passes; every estimate carries the same two-sided confidence radius the
//! rest of the crate uses. On top of that sit conditional view ensembles
//! (what a player saw, given that the run's image hit a target set of game
//! histories) and the partition consistency check, which asks whether any
//! suite distinguisher can tell members of a declared information cell apart
//! from the views alone.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::bits::{flatten, BitSource, BitString};
use crate::crypto::{commit, CryptoError, Oracle, PermTable, QueryMeter};
use crate::game::{GameTree, InfoSetId, NodeId};
use crate::machine::{run_game_full, stream_trial_seed, Machine, Transcript, View};
use crate::represent::Represent;
use crate::seeding::{derive, tags};
use crate::stats::{hoeffding_radius, nonincreasing_within};
use crate::tape::RandomTape;

/// Lineup identifier for [`standard_suite`]; bump when the membership or
/// any member's decision rule changes, so reports stay comparable.
pub const SUITE_VERSION: &str = "v1";

/// Minimum number of hits a conditional ensemble must score in a reach probe
/// before the consistency check will condition on it.
pub const REACH_FLOOR: u64 = 10;

/// A bounded party trying to tell two sample distributions apart. `decide`
/// must be deterministic given the sample and the coin source; its
/// permutation access goes through a meter set to `query_budget(n)`.
pub trait Distinguisher: Sync {
    fn name(&self) -> &str;

    /// Forward-query allowance at size `n`.
    fn query_budget(&self, n: u32) -> u64;

    /// Output 1 (`true`) or 0. Any error, budget exhaustion included, is
    /// scored as an output of 0 by the estimator.
    fn decide(
        &self,
        n: u32,
        sample: &BitString,
        coins: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<bool, CryptoError>;
}

/// The challenger side of a distinguishing experiment: produces one sample
/// together with the permutation instance it was generated against, so the
/// distinguisher can probe the same permutation. Trusted, unbudgeted.
pub trait SampleSource: Sync {
    fn sample(&self, n: u32, seed: u64) -> Result<(BitString, PermTable), SampleError>;
}

impl<F> SampleSource for F
where
    F: Fn(u32, u64) -> Result<(BitString, PermTable), SampleError> + Sync,
{
    fn sample(&self, n: u32, seed: u64) -> Result<(BitString, PermTable), SampleError> {
        self(n, seed)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("sampling failed: {0}")]
pub struct SampleError(pub String);

/// One advantage estimate. `accept_x`/`accept_y` are the acceptance rates of
/// the two passes, `advantage` their absolute difference, and `radius` the
/// per-rate confidence radius at the crate's standard confidence level.
#[derive(Debug, Clone)]
pub struct AdvantageRow {
    pub distinguisher: String,
    pub n: u32,
    pub trials: u64,
    pub accept_x: f64,
    pub accept_y: f64,
    pub advantage: f64,
    pub radius: f64,
    /// Analytic ceiling, when the experiment has one.
    pub bound: Option<f64>,
}

fn acceptance_rate(
    d: &dyn Distinguisher,
    src: &dyn SampleSource,
    n: u32,
    trials: u64,
    seed: u64,
) -> Result<u64, SampleError> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let tseed = stream_trial_seed(seed, t);
            let (sample, mut perm) = src.sample(n, tseed)?;
            let mut meter = QueryMeter::with_budget(d.query_budget(n));
            let mut oracle = Oracle::new(&mut perm, &mut meter);
            let mut coins = RandomTape::new(derive(tseed, tags::DECIDER));
            Ok(match d.decide(n, &sample, &mut coins, &mut oracle) {
                Ok(b) => b as u64,
                Err(_) => 0,
            })
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Estimate `|Pr[D(X) = 1] - Pr[D(Y) = 1]|` over `trials` fresh samples per
/// side. The two passes use independent seed streams, each trial gets its
/// own permutation instance from its sampler, and the distinguisher's coins
/// are derived per trial, so the whole estimate is reproducible from `seed`.
pub fn estimate_advantage(
    d: &dyn Distinguisher,
    x: &dyn SampleSource,
    y: &dyn SampleSource,
    n: u32,
    trials: u64,
    seed: u64,
) -> Result<AdvantageRow, SampleError> {
    assert!(trials > 0, "need at least one trial");
    let hits_x = acceptance_rate(d, x, n, trials, derive(seed, 0xE0))?;
    let hits_y = acceptance_rate(d, y, n, trials, derive(seed, 0xE1))?;
    let accept_x = hits_x as f64 / trials as f64;
    let accept_y = hits_y as f64 / trials as f64;
    Ok(AdvantageRow {
        distinguisher: d.name().to_string(),
        n,
        trials,
        accept_x,
        accept_y,
        advantage: (accept_x - accept_y).abs(),
        radius: hoeffding_radius(trials),
        bound: None,
    })
}

/// Always outputs the same bit. Calibrates the harness: its advantage is
/// exactly zero against any pair of samplers.
pub struct Constant(pub bool);

impl Distinguisher for Constant {
    fn name(&self) -> &str {
        if self.0 {
            "constant-1"
        } else {
            "constant-0"
        }
    }

    fn query_budget(&self, _n: u32) -> u64 {
        0
    }

    fn decide(
        &self,
        _n: u32,
        _sample: &BitString,
        _coins: &mut dyn BitSource,
        _oracle: &mut Oracle,
    ) -> Result<bool, CryptoError> {
        Ok(self.0)
    }
}

/// Outputs the sample's first bit.
pub struct FirstBit;

impl Distinguisher for FirstBit {
    fn name(&self) -> &str {
        "first-bit"
    }

    fn query_budget(&self, _n: u32) -> u64 {
        0
    }

    fn decide(
        &self,
        _n: u32,
        sample: &BitString,
        _coins: &mut dyn BitSource,
        _oracle: &mut Oracle,
    ) -> Result<bool, CryptoError> {
        Ok(!sample.is_empty() && sample.bit(0))
    }
}

/// Outputs 1 iff more than half the sample bits are ones.
pub struct FrequencyThreshold;

impl Distinguisher for FrequencyThreshold {
    fn name(&self) -> &str {
        "frequency-threshold"
    }

    fn query_budget(&self, _n: u32) -> u64 {
        0
    }

    fn decide(
        &self,
        _n: u32,
        sample: &BitString,
        _coins: &mut dyn BitSource,
        _oracle: &mut Oracle,
    ) -> Result<bool, CryptoError> {
        Ok(2 * sample.count_ones() > sample.len())
    }
}

/// Recommit-and-compare against the all-zero key: treats the first `n` bits
/// of the sample as a width-`n` commitment string and outputs 1 iff it
/// equals the commitment to 1 under the all-zero key. One query. Catches
/// parties that commit with degenerate randomness.
pub struct ReplayZeroKey;

impl Distinguisher for ReplayZeroKey {
    fn name(&self) -> &str {
        "replay-zero-key"
    }

    fn query_budget(&self, _n: u32) -> u64 {
        1
    }

    fn decide(
        &self,
        n: u32,
        sample: &BitString,
        _coins: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<bool, CryptoError> {
        if !(2..=64).contains(&n) || sample.len() < n as usize {
            return Ok(false);
        }
        let c = sample.slice(0, n as usize).to_u64();
        Ok(oracle.forward(n as u8, 1)? == c)
    }
}

/// Bounded key enumeration: treats the first `n` bits of the sample as a
/// width-`n` commitment string and tests candidate keys against the bit 1
/// in ascending order until the budget would be exceeded. Outputs 1 iff a
/// key matches. With budget `2^(n-1)` the enumeration is exhaustive and the
/// committed bit is recovered exactly; below that its advantage tracks the
/// fraction of key space covered.
pub struct Enumerate {
    budget: u64,
    name: String,
}

impl Enumerate {
    pub fn new(budget: u64) -> Self {
        Enumerate { budget, name: format!("enumerate[{budget}]") }
    }
}

impl Distinguisher for Enumerate {
    fn name(&self) -> &str {
        &self.name
    }

    fn query_budget(&self, _n: u32) -> u64 {
        self.budget
    }

    fn decide(
        &self,
        n: u32,
        sample: &BitString,
        _coins: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<bool, CryptoError> {
        if !(2..=64).contains(&n) || sample.len() < n as usize {
            return Ok(false);
        }
        let width = n as u8;
        let c = sample.slice(0, n as usize).to_u64();
        for key in 0..1u64 << (width - 1) {
            if oracle.queries_used() + 1 > self.budget {
                return Ok(false);
            }
            if oracle.forward(width, key << 1 | 1)? == c {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// The fixed suite (version [`SUITE_VERSION`]) used by the consistency
/// check, with the enumeration member capped at `enum_budget` queries.
pub fn standard_suite(enum_budget: u64) -> Vec<Box<dyn Distinguisher>> {
    vec![
        Box::new(Constant(false)),
        Box::new(Constant(true)),
        Box::new(FirstBit),
        Box::new(FrequencyThreshold),
        Box::new(ReplayZeroKey),
        Box::new(Enumerate::new(enum_budget)),
    ]
}

/// Challenger producing width-`n` commitments to a fixed bit under fresh
/// uniformly drawn keys. The standard hiding experiment pits the two bits'
/// samplers against each other.
pub struct CommitSampler {
    pub bit: bool,
}

impl SampleSource for CommitSampler {
    fn sample(&self, n: u32, seed: u64) -> Result<(BitString, PermTable), SampleError> {
        if !(2..=64).contains(&n) {
            return Err(SampleError(format!("commitment width {n} out of range")));
        }
        let mut perm = PermTable::new(derive(seed, tags::PERM));
        let mut tape = RandomTape::new(derive(seed, tags::SAMPLER));
        let mut meter = QueryMeter::unbounded();
        let c = commit(&mut Oracle::new(&mut perm, &mut meter), n as u8, self.bit, &mut tape)
            .map_err(|e| SampleError(e.to_string()))?;
        Ok((c.string, perm))
    }
}

/// Degenerate challenger that always commits under the all-zero key, making
/// the committed bit recoverable by [`ReplayZeroKey`].
pub struct ZeroKeyCommitSampler {
    pub bit: bool,
}

impl SampleSource for ZeroKeyCommitSampler {
    fn sample(&self, n: u32, seed: u64) -> Result<(BitString, PermTable), SampleError> {
        if !(2..=64).contains(&n) {
            return Err(SampleError(format!("commitment width {n} out of range")));
        }
        let mut perm = PermTable::new(derive(seed, tags::PERM));
        let image = perm.forward(n as u8, self.bit as u64);
        Ok((BitString::from_u64(image, n as usize), perm))
    }
}

/// A set of decision histories of the finite game that conditional view
/// sampling may target.
#[derive(Debug, Clone)]
pub struct ViewTarget {
    nodes: BTreeSet<NodeId>,
}

impl ViewTarget {
    pub fn node(h: NodeId) -> Self {
        ViewTarget { nodes: [h].into_iter().collect() }
    }

    pub fn set(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        ViewTarget { nodes: nodes.into_iter().collect() }
    }

    /// All members of an information set.
    pub fn cell(g: &GameTree, i: InfoSetId) -> Self {
        Self::set(g.infoset(i).members.iter().copied())
    }

    /// Everything in `members` except `h`.
    pub fn rest(members: &[NodeId], h: NodeId) -> Self {
        Self::set(members.iter().copied().filter(|&m| m != h))
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains(&id)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Canonical sample encoding of a view: the visible history components
/// concatenated, followed by the consumed-randomness record if the machine
/// is stateful. Targets with variable-width components must make widths
/// self-delimiting at the family level for this to be injective.
pub fn serialize_view(view: &View) -> BitString {
    let mut s = flatten(&view.history);
    if let Some(consumed) = &view.consumed {
        s.extend(&flatten(consumed));
    }
    s
}

/// First activation of `transcript` whose preceding history maps into
/// `target` under this run's own permutation; returns the mover's view.
fn target_view(
    rep: &dyn Represent,
    n: u32,
    transcript: &Transcript,
    perm: &mut PermTable,
    target: &ViewTarget,
) -> Option<View> {
    let actions: Vec<BitString> =
        transcript.activations.iter().map(|a| a.action.clone()).collect();
    for (k, act) in transcript.activations.iter().enumerate() {
        if target.contains(rep.map_history(n, &actions[..k], perm)) {
            return Some(act.view.clone());
        }
    }
    None
}

const ATTEMPT: u64 = 0x20;

/// Conditional view distribution: run the machine profile, keep the view the
/// mover saw where the run's image first entered `target`, reject runs that
/// never do. Each rejection consumes one full fresh run (fresh permutation
/// included), so accepted samples follow the true conditional distribution.
pub struct ViewEnsemble<'a> {
    pub rep: &'a dyn Represent,
    pub machines: &'a [&'a dyn Machine],
    pub target: ViewTarget,
    /// Consecutive misses tolerated within one sample before erroring out.
    pub max_rejects: u64,
}

impl SampleSource for ViewEnsemble<'_> {
    fn sample(&self, n: u32, seed: u64) -> Result<(BitString, PermTable), SampleError> {
        for attempt in 0..self.max_rejects.max(1) {
            let aseed = derive(seed, ATTEMPT + attempt);
            let (transcript, mut perm) =
                run_game_full(self.rep.family(), n, self.machines, aseed);
            if let Some(view) = target_view(self.rep, n, &transcript, &mut perm, &self.target) {
                return Ok((serialize_view(&view), perm));
            }
        }
        Err(SampleError(format!(
            "target {:?} not reached in {} runs at n={n}",
            self.target.nodes, self.max_rejects
        )))
    }
}

/// Did this run's image path enter `target`? Verifier-side: maps prefixes
/// under the run's own permutation.
pub fn transcript_reaches(
    rep: &dyn Represent,
    n: u32,
    transcript: &Transcript,
    perm: &mut PermTable,
    target: &ViewTarget,
) -> bool {
    target_view(rep, n, transcript, perm, target).is_some()
}

/// How many of `trials` independent runs reach `target`.
pub fn reach_count(
    rep: &dyn Represent,
    machines: &[&dyn Machine],
    target: &ViewTarget,
    n: u32,
    trials: u64,
    seed: u64,
) -> u64 {
    (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let tseed = stream_trial_seed(seed, t);
            let (transcript, mut perm) = run_game_full(rep.family(), n, machines, tseed);
            target_view(rep, n, &transcript, &mut perm, target).is_some()
        })
        .count() as u64
}

/// A claimed grouping of the finite game's decision histories, one cell per
/// (player, set of histories the player should not be able to tell apart).
#[derive(Debug, Clone)]
pub struct Partition {
    pub cells: Vec<PartitionCell>,
}

#[derive(Debug, Clone)]
pub struct PartitionCell {
    pub player: usize,
    pub label: String,
    pub members: Vec<NodeId>,
}

/// The game's own information partition.
pub fn game_partition(g: &GameTree) -> Partition {
    let mut cells = Vec::new();
    for player in 0..g.num_players() {
        for i in g.infosets_of(player) {
            let set = g.infoset(i);
            cells.push(PartitionCell {
                player,
                label: set.label.clone(),
                members: set.members.clone(),
            });
        }
    }
    Partition { cells }
}

/// One suite-member estimate inside the consistency check.
#[derive(Debug, Clone)]
pub struct PartitionRow {
    pub player: usize,
    pub cell: String,
    pub member: String,
    pub n: u32,
    pub distinguisher: String,
    pub trials: u64,
    pub advantage: f64,
    pub radius: f64,
}

/// Verdict for one (cell, member) pair across the whole size ladder.
#[derive(Debug, Clone)]
pub struct MemberVerdict {
    pub player: usize,
    pub cell: String,
    pub member: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct PartitionReport {
    pub suite: Vec<String>,
    pub n_list: Vec<u32>,
    pub trials: u64,
    pub decay_tol: f64,
    pub rows: Vec<PartitionRow>,
    pub verdicts: Vec<MemberVerdict>,
    /// Cell members that could not be conditioned on, with the reason.
    pub skipped: Vec<String>,
    pub note: &'static str,
}

impl PartitionReport {
    /// True iff every checked member passed. Skipped members are listed but
    /// do not fail the report; callers needing full coverage must inspect
    /// `skipped`.
    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Caveat attached to every consistency report: the underlying theorem runs
/// one way only.
pub const PARTITION_NOTE: &str = "a failure refutes the declared cells; a pass \
    means no suite distinguisher separated the conditional views at these \
    sizes and budgets, which supports but does not certify the cells";

/// Check that members of each declared non-singleton cell are
/// view-indistinguishable: for every member `h` with both conditional
/// ensembles reaching the floor, estimate each suite distinguisher's
/// advantage between views seen at `h` and views seen elsewhere in the cell,
/// at every size in `n_list`. The member passes iff the max-over-suite
/// advantage at the largest size is at most `decay_tol + 3 * radius` and the
/// ladder is nonincreasing within the same slack.
pub fn check_consistent_partition(
    rep: &dyn Represent,
    machines: &[&dyn Machine],
    partition: &Partition,
    suite: &[Box<dyn Distinguisher>],
    n_list: &[u32],
    trials: u64,
    decay_tol: f64,
    max_rejects: u64,
    seed: u64,
) -> PartitionReport {
    assert!(!n_list.is_empty() && !suite.is_empty());
    let mut sizes = n_list.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let radius = hoeffding_radius(trials);
    let slack = 3.0 * radius;

    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    let mut skipped = Vec::new();

    for (ci, cell) in partition.cells.iter().enumerate() {
        if cell.members.len() < 2 {
            continue;
        }
        let cell_seed = derive(seed, 0x1000 + ci as u64);
        for (mi, &h) in cell.members.iter().enumerate() {
            let member = rep.game().display_history(h);
            let member_seed = derive(cell_seed, mi as u64);
            let here = ViewTarget::node(h);
            let rest = ViewTarget::rest(&cell.members, h);
            let mut ladder: Vec<f64> = Vec::new();
            let mut skip_reason = None;

            for &n in &sizes {
                let sn = derive(member_seed, n as u64);
                let reach_here =
                    reach_count(rep, machines, &here, n, trials, derive(sn, 0xA1));
                let reach_rest =
                    reach_count(rep, machines, &rest, n, trials, derive(sn, 0xA2));
                if reach_here < REACH_FLOOR || reach_rest < REACH_FLOOR {
                    skip_reason = Some(format!(
                        "reach {reach_here} and {reach_rest} of {trials} at n={n} \
                         (floor {REACH_FLOOR})"
                    ));
                    break;
                }
                let x = ViewEnsemble { rep, machines, target: here.clone(), max_rejects };
                let y = ViewEnsemble { rep, machines, target: rest.clone(), max_rejects };
                let mut best = f64::NEG_INFINITY;
                for (di, d) in suite.iter().enumerate() {
                    let est = estimate_advantage(
                        d.as_ref(),
                        &x,
                        &y,
                        n,
                        trials,
                        derive(sn, 0xD0 + di as u64),
                    );
                    match est {
                        Ok(row) => {
                            best = best.max(row.advantage);
                            rows.push(PartitionRow {
                                player: cell.player,
                                cell: cell.label.clone(),
                                member: member.clone(),
                                n,
                                distinguisher: row.distinguisher,
                                trials,
                                advantage: row.advantage,
                                radius: row.radius,
                            });
                        }
                        Err(e) => {
                            skip_reason = Some(e.to_string());
                            break;
                        }
                    }
                }
                if skip_reason.is_some() {
                    break;
                }
                ladder.push(best);
            }

            if let Some(reason) = skip_reason {
                skipped.push(format!(
                    "player {} cell {} member {}: {reason}",
                    cell.player, cell.label, member
                ));
                continue;
            }

            let last = *ladder.last().expect("nonempty ladder");
            let threshold = decay_tol + slack;
            let decays = nonincreasing_within(&ladder, slack);
            let pass = last <= threshold && decays;
            let detail = if pass {
                format!(
                    "max advantage {last:.4} at n={} (threshold {threshold:.4})",
                    sizes.last().unwrap()
                )
            } else if last > threshold {
                format!(
                    "max advantage {last:.4} at n={} exceeds threshold {threshold:.4}",
                    sizes.last().unwrap()
                )
            } else {
                format!("advantage ladder {ladder:?} is not nonincreasing within {slack:.4}")
            };
            verdicts.push(MemberVerdict {
                player: cell.player,
                cell: cell.label.clone(),
                member,
                pass,
                detail,
            });
        }
    }

    PartitionReport {
        suite: suite.iter().map(|d| d.name().to_string()).collect(),
        n_list: sizes,
        trials,
        decay_tol,
        rows,
        verdicts,
        skipped,
        note: PARTITION_NOTE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::represent::testreps::{behavioral, uniform_pair, ParityRep};
    use crate::represent::{lift_profile, machine_refs};

    fn fixed_sample(bits: u64, len: usize) -> impl SampleSource {
        move |_n: u32, seed: u64| {
            Ok((BitString::from_u64(bits, len), PermTable::new(derive(seed, tags::PERM))))
        }
    }

    #[test]
    fn constants_never_distinguish() {
        let x = CommitSampler { bit: true };
        let y = CommitSampler { bit: false };
        for value in [false, true] {
            let row = estimate_advantage(&Constant(value), &x, &y, 16, 200, 5).unwrap();
            assert_eq!(row.advantage, 0.0);
            assert_eq!(row.accept_x, value as u64 as f64);
        }
    }

    #[test]
    fn identical_samplers_stay_within_radius() {
        let x = CommitSampler { bit: true };
        let y = CommitSampler { bit: true };
        for d in standard_suite(32) {
            let row = estimate_advantage(d.as_ref(), &x, &y, 12, 600, 7).unwrap();
            assert!(
                row.advantage <= 3.0 * row.radius,
                "{} advantage {} radius {}",
                row.distinguisher,
                row.advantage,
                row.radius
            );
        }
    }

    #[test]
    fn first_bit_separates_planted_prefix() {
        let x = fixed_sample(0b10, 2);
        let y = fixed_sample(0b00, 2);
        let row = estimate_advantage(&FirstBit, &x, &y, 2, 50, 9).unwrap();
        assert_eq!(row.advantage, 1.0);
    }

    #[test]
    fn exhaustive_enumeration_recovers_the_committed_bit() {
        // Width 10: 512 candidate keys, budget 512 covers them all.
        let x = CommitSampler { bit: true };
        let y = CommitSampler { bit: false };
        let d = Enumerate::new(512);
        let row = estimate_advantage(&d, &x, &y, 10, 300, 11).unwrap();
        assert!(row.advantage >= 0.99, "advantage {}", row.advantage);
        assert_eq!(row.accept_x, 1.0);
        assert_eq!(row.accept_y, 0.0);
    }

    #[test]
    fn starved_enumeration_tracks_the_key_space_fraction() {
        let x = CommitSampler { bit: true };
        let y = CommitSampler { bit: false };
        let d = Enumerate::new(64);
        let row = estimate_advantage(&d, &x, &y, 16, 500, 13).unwrap();
        // Covers 64 of 2^15 keys.
        let bound = 64.0 / 32768.0;
        assert!(
            row.advantage <= bound + 3.0 * row.radius,
            "advantage {} bound {}",
            row.advantage,
            bound
        );
    }

    #[test]
    fn replay_catches_the_zero_key_cheat_but_not_honest_commitments() {
        let d = ReplayZeroKey;
        let cheat = estimate_advantage(
            &d,
            &ZeroKeyCommitSampler { bit: true },
            &ZeroKeyCommitSampler { bit: false },
            16,
            200,
            15,
        )
        .unwrap();
        assert_eq!(cheat.advantage, 1.0);

        let honest = estimate_advantage(
            &d,
            &CommitSampler { bit: true },
            &CommitSampler { bit: false },
            16,
            2_000,
            17,
        )
        .unwrap();
        assert!(honest.advantage <= 3.0 * honest.radius, "advantage {}", honest.advantage);
    }

    #[test]
    fn estimates_are_reproducible_and_pool_independent() {
        let run = || {
            estimate_advantage(
                &ReplayZeroKey,
                &CommitSampler { bit: true },
                &CommitSampler { bit: false },
                8,
                400,
                19,
            )
            .unwrap()
        };
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(run);
        assert_eq!(a.accept_x, b.accept_x);
        assert_eq!(a.accept_y, b.accept_y);
    }

    #[test]
    fn view_ensemble_conditions_on_the_target_image() {
        let rep = ParityRep::open();
        let profile = uniform_pair(&rep.g);
        let machines = lift_profile(&rep, &profile);
        let refs = machine_refs(&machines);
        let x_child = rep.g.node_by_labels(&["x"]).unwrap();
        let ens = ViewEnsemble {
            rep: &rep,
            machines: &refs,
            target: ViewTarget::node(x_child),
            max_rejects: 100,
        };
        for t in 0..50 {
            let (sample, _) = ens.sample(5, stream_trial_seed(21, t)).unwrap();
            assert_eq!(sample.len(), 5);
            assert_eq!(sample.count_ones() % 2, 0, "conditioned on even parity");
        }

        let masked = ParityRep::new();
        let mprofile = uniform_pair(&masked.g);
        let mmachines = lift_profile(&masked, &mprofile);
        let mrefs = machine_refs(&mmachines);
        let mens = ViewEnsemble {
            rep: &masked,
            machines: &mrefs,
            target: ViewTarget::node(masked.g.node_by_labels(&["x"]).unwrap()),
            max_rejects: 100,
        };
        let (sample, _) = mens.sample(5, 23).unwrap();
        assert!(sample.all_zero(), "masked view should carry no information");
    }

    #[test]
    fn unreachable_target_errors_after_max_rejects() {
        let rep = ParityRep::new();
        let profile = vec![
            behavioral(&rep.g, 0, "hide", &[("x", 1, 1), ("y", 0, 1)]),
            behavioral(&rep.g, 1, "guess", &[("l", 1, 2), ("r", 1, 2)]),
        ];
        let machines = lift_profile(&rep, &profile);
        let refs = machine_refs(&machines);
        let y_child = rep.g.node_by_labels(&["y"]).unwrap();
        let ens = ViewEnsemble {
            rep: &rep,
            machines: &refs,
            target: ViewTarget::node(y_child),
            max_rejects: 20,
        };
        assert!(ens.sample(4, 25).is_err());
    }

    #[test]
    fn game_partition_lists_each_infoset_once() {
        let rep = ParityRep::new();
        let partition = game_partition(&rep.g);
        assert_eq!(partition.cells.len(), 2);
        let sizes: Vec<usize> = partition.cells.iter().map(|c| c.members.len()).collect();
        assert!(sizes.contains(&1) && sizes.contains(&2));
    }

    #[test]
    fn masked_views_pass_the_consistency_check() {
        let rep = ParityRep::new();
        let profile = uniform_pair(&rep.g);
        let machines = lift_profile(&rep, &profile);
        let refs = machine_refs(&machines);
        let partition = game_partition(&rep.g);
        let suite = standard_suite(16);
        let report =
            check_consistent_partition(&rep, &refs, &partition, &suite, &[2, 3], 600, 0.05, 400, 27);
        assert!(report.pass(), "verdicts: {:?}", report.verdicts);
        // Only the two-member guess cell is checked, both members of it.
        assert_eq!(report.verdicts.len(), 2);
        assert!(report.skipped.is_empty());
        assert_eq!(report.rows.len(), 2 * 2 * suite.len());
    }

    #[test]
    fn leaked_views_fail_the_consistency_check() {
        // Unmasked family at n=1: the guesser's view is the parity itself.
        let rep = ParityRep::open();
        let profile = uniform_pair(&rep.g);
        let machines = lift_profile(&rep, &profile);
        let refs = machine_refs(&machines);
        let partition = game_partition(&rep.g);
        let suite = standard_suite(4);
        let report =
            check_consistent_partition(&rep, &refs, &partition, &suite, &[1], 400, 0.05, 400, 29);
        assert!(!report.pass());
        let failed: Vec<_> = report.verdicts.iter().filter(|v| !v.pass).collect();
        assert_eq!(failed.len(), 2);
        let best: Vec<_> = report
            .rows
            .iter()
            .filter(|r| r.advantage > 0.9)
            .map(|r| r.distinguisher.as_str())
            .collect();
        assert!(best.contains(&"first-bit"), "rows: {:?}", report.rows);
    }

    #[test]
    fn unreached_members_are_skipped_not_failed() {
        let rep = ParityRep::new();
        let profile = vec![
            behavioral(&rep.g, 0, "hide", &[("x", 1, 1), ("y", 0, 1)]),
            behavioral(&rep.g, 1, "guess", &[("l", 1, 2), ("r", 1, 2)]),
        ];
        let machines = lift_profile(&rep, &profile);
        let refs = machine_refs(&machines);
        let partition = game_partition(&rep.g);
        let suite = standard_suite(4);
        let report =
            check_consistent_partition(&rep, &refs, &partition, &suite, &[3], 200, 0.05, 50, 31);
        // Both guess-cell members need the other side reachable; neither is.
        assert!(report.verdicts.is_empty());
        assert_eq!(report.skipped.len(), 2);
        assert!(report.pass(), "vacuous pass with everything skipped");
    }
}

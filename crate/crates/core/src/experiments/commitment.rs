//! The bit commitment game. Player 1 commits to a bit, player 2 announces a
//! guess at it, and player 1 then opens the commitment or destroys it. The
//! finite description has fifteen nodes; the computational version replaces
//! the commit move with a width-`n` commitment string, the guess with one
//! bit, and the reveal with the `n-1`-bit key (flipping its last bit
//! destroys).
//!
//! Three scorings share the tree: the zero-sum original, a coordination
//! variant whose computational version admits a low-entropy-key profile
//! with no abstract counterpart, and a win/loss scoring on `{0,1}` used by
//! the key-length separation.

use num::ToPrimitive;

use crate::bits::{BitReader, BitSource, BitString};
use crate::crypto::{
    commit, committed_bit, hiding_advantage_bound, reveal, CryptoError, Oracle, PermTable, Reveal,
};
use crate::equilibria::{check_computational_ne, lift_ne, DeviationBattery};
use crate::game::{
    check_epsilon_ne, expected_utility, ActionId, BehavioralStrategy, GameTree, InfoSetId, NodeId,
    RawGame, RawNode, Strategy, StrategyProfile,
};
use crate::indist::{
    check_consistent_partition, estimate_advantage, game_partition, standard_suite, CommitSampler,
    Enumerate,
};
use crate::machine::{GameFamily, Machine, MachineKind, View};
use crate::represent::{
    lift_profile, machine_refs, sample_behavioral, verify_interpreters,
    verify_outcome_correspondence, verify_structure, verify_utilities, Represent, VerifyMode,
};
use crate::seeding::derive;
use crate::tape::sample_index;
use crate::Rational;

use super::ResultRow;

/// How the three outcomes are scored, as `(committer, guesser)` payoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scoring {
    /// Opening a missed guess pays the committer 1 at the guesser's expense;
    /// an opened match or a destroyed commitment pays the guesser.
    ZeroSum,
    /// Both get 1 on an opened match and -1 otherwise: destroying is as bad
    /// as mismatching.
    Coordination,
    /// Win/loss on `{0,1}`: the committer wins exactly when it opens a bit
    /// the guesser missed, so the two payoffs always sum to 1.
    WinLoss,
}

impl Scoring {
    fn payoff(self, bit: bool, guess: bool, opened: bool) -> [i64; 2] {
        let committer_wins = opened && bit != guess;
        match self {
            Scoring::ZeroSum => {
                if committer_wins {
                    [1, -1]
                } else {
                    [-1, 1]
                }
            }
            Scoring::Coordination => {
                if opened && bit == guess {
                    [1, 1]
                } else {
                    [-1, -1]
                }
            }
            Scoring::WinLoss => {
                if committer_wins {
                    [1, 0]
                } else {
                    [0, 1]
                }
            }
        }
    }

    fn bounds(self) -> (i64, i64) {
        match self {
            Scoring::WinLoss => (0, 1),
            _ => (-1, 1),
        }
    }

    fn family_name(self) -> &'static str {
        match self {
            Scoring::ZeroSum => "commitment",
            Scoring::Coordination => "commitment-prime",
            Scoring::WinLoss => "commitment-winloss",
        }
    }
}

fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

pub(super) fn commitment_tree(scoring: Scoring) -> GameTree {
    let mut entries: Vec<(Vec<String>, RawNode)> = Vec::new();
    entries.push((Vec::new(), RawNode::Decision { player: 0, infoset: "commit".into() }));
    for b in 0..2u8 {
        let cb = format!("c{b}");
        entries.push((vec![cb.clone()], RawNode::Decision { player: 1, infoset: "guess".into() }));
        for x in 0..2u8 {
            let gx = format!("g{x}");
            let node = vec![cb.clone(), gx.clone()];
            entries.push((
                node.clone(),
                RawNode::Decision { player: 0, infoset: format!("rev{b}{x}") },
            ));
            for (opened, word) in [(true, "open"), (false, "destroy")] {
                let mut t = node.clone();
                t.push(format!("{word}{b}{x}"));
                let u = scoring.payoff(b == 1, x == 1, opened);
                entries.push((t, RawNode::Terminal { utilities: u.iter().map(|&v| rat(v)).collect() }));
            }
        }
    }
    GameTree::from_raw(&RawGame { num_players: 2, entries })
        .expect("the commitment tree is well formed")
}

/// The zero-sum commitment guessing game.
pub fn fig1_game() -> GameTree {
    commitment_tree(Scoring::ZeroSum)
}

/// The coordination-scored variant.
pub fn variant_prime_game() -> GameTree {
    commitment_tree(Scoring::Coordination)
}

/// The commitment game family: histories are a width-`n` commitment string,
/// one guess bit, then an `n-1`-bit key. Perfect information; utilities
/// invert the permutation verifier-side to score the committed bit.
pub struct CommitFamily {
    scoring: Scoring,
}

impl CommitFamily {
    pub fn new(scoring: Scoring) -> CommitFamily {
        CommitFamily { scoring }
    }

    fn check_n(n: u32) {
        assert!((2..=64).contains(&n), "commitment sizes are 2..=64, got {n}");
    }

    fn action_width(n: u32, stage: usize) -> usize {
        match stage {
            0 => n as usize,
            1 => 1,
            _ => n as usize - 1,
        }
    }
}

impl GameFamily for CommitFamily {
    fn name(&self) -> &str {
        self.scoring.family_name()
    }

    fn num_players(&self) -> usize {
        2
    }

    fn action_length_bound(&self, n: u32) -> usize {
        n as usize
    }

    fn is_history(&self, n: u32, h: &[BitString]) -> bool {
        Self::check_n(n);
        h.len() <= 3 && h.iter().enumerate().all(|(i, a)| a.len() == Self::action_width(n, i))
    }

    fn is_terminal(&self, _n: u32, h: &[BitString]) -> bool {
        h.len() == 3
    }

    fn player(&self, _n: u32, h: &[BitString]) -> usize {
        usize::from(h.len() == 1)
    }

    fn utilities(&self, n: u32, h: &[BitString], perm: &mut PermTable) -> Vec<Rational> {
        Self::check_n(n);
        let (key, bit) = committed_bit(perm, &h[0]);
        let opened = h[2] == key;
        self.scoring.payoff(bit, h[1].bit(0), opened).iter().map(|&v| rat(v)).collect()
    }

    fn utility_bounds(&self, _n: u32) -> (Rational, Rational) {
        let (lo, hi) = self.scoring.bounds();
        (rat(lo), rat(hi))
    }

    fn enumerate_actions(&self, n: u32, h: &[BitString]) -> Vec<BitString> {
        let w = Self::action_width(n, h.len());
        assert!(w < 48, "action enumeration at width {w} is not desk-scale");
        (0..1u64 << w).map(|v| BitString::from_u64(v, w)).collect()
    }

    fn sample_action(&self, n: u32, h: &[BitString], src: &mut dyn BitSource) -> BitString {
        src.take(Self::action_width(n, h.len()))
    }
}

/// The commitment game bundled with its history map, lift, and
/// interpreters.
pub struct CommitRep {
    g: GameTree,
    family: CommitFamily,
    commit_cell: InfoSetId,
    guess_cell: InfoSetId,
    rev_cell: [[InfoSetId; 2]; 2],
    c_act: [ActionId; 2],
    g_act: [ActionId; 2],
    open_act: [[ActionId; 2]; 2],
    commit_child: [NodeId; 2],
    rev_node: [[NodeId; 2]; 2],
}

/// The zero-sum commitment game with its standard representation.
pub fn build_commitment_game() -> CommitRep {
    CommitRep::new(Scoring::ZeroSum)
}

/// The coordination variant with the same representation.
pub fn build_variant_prime() -> CommitRep {
    CommitRep::new(Scoring::Coordination)
}

impl CommitRep {
    pub fn new(scoring: Scoring) -> CommitRep {
        let g = commitment_tree(scoring);
        let cell = |label: &str| g.infoset_by_label(label).unwrap();
        let act = |label: &str| g.action_by_label(label).unwrap();
        let commit_cell = cell("commit");
        let c_act = [act("c0"), act("c1")];
        let g_act = [act("g0"), act("g1")];
        let commit_child = [0, 1].map(|b| g.child(g.root(), c_act[b]).unwrap());
        let rev_node =
            [0, 1].map(|b| [0, 1].map(|x| g.child(commit_child[b], g_act[x]).unwrap()));
        CommitRep {
            commit_cell,
            guess_cell: cell("guess"),
            rev_cell: [0, 1].map(|b| [0, 1].map(|x| cell(&format!("rev{b}{x}")))),
            c_act,
            g_act,
            open_act: [0, 1].map(|b| [0, 1].map(|x| act(&format!("open{b}{x}")))),
            commit_child,
            rev_node,
            family: CommitFamily::new(scoring),
            g,
        }
    }

    /// The committer's bit and key, recovered machine-side from its own
    /// consumed randomness: the key is the last `n-1` bits of the first
    /// segment, and one receiver check on the viewed commitment string
    /// yields the bit. `None` when the record does not verify (for example
    /// after a tremble replaced the commit activation).
    fn own_bit(&self, view: &View, oracle: &mut Oracle) -> Result<Option<bool>, CryptoError> {
        let n = view.n as usize;
        if view.player != 0 || view.history.is_empty() || view.history[0].len() != n {
            return Ok(None);
        }
        let Some(seg) = view.consumed.as_ref().and_then(|c| c.first()) else {
            return Ok(None);
        };
        if seg.len() < n - 1 {
            return Ok(None);
        }
        let key = seg.slice(seg.len() - (n - 1), seg.len());
        Ok(match reveal(oracle, &view.history[0], &key)? {
            Reveal::Bit(b) => Some(b),
            Reveal::Fail => None,
        })
    }
}

impl Represent for CommitRep {
    fn game(&self) -> &GameTree {
        &self.g
    }

    fn family(&self) -> &dyn GameFamily {
        &self.family
    }

    fn map_history(&self, _n: u32, h: &[BitString], perm: &mut PermTable) -> NodeId {
        if h.is_empty() {
            return self.g.root();
        }
        let (key, bit) = committed_bit(perm, &h[0]);
        let b = bit as usize;
        let mut node = self.commit_child[b];
        if h.len() >= 2 {
            let x = h[1].bit(0) as usize;
            node = self.rev_node[b][x];
            if h.len() == 3 {
                let act = if h[2] == key {
                    self.open_act[b][x]
                } else {
                    self.g.infoset(self.rev_cell[b][x]).actions[1]
                };
                node = self.g.child(node, act).unwrap();
            }
        }
        node
    }

    fn lift(&self, player: usize, sigma: &BehavioralStrategy) -> Box<dyn Machine> {
        if player == 0 {
            let commit_actions = self.g.infoset(self.commit_cell).actions.clone();
            Box::new(LiftedCommitter {
                commit_weights: commit_actions.iter().map(|&a| sigma.prob(self.commit_cell, a)).collect(),
                commit_bit: commit_actions.iter().map(|&a| a == self.c_act[1]).collect(),
                reveal: [0, 1].map(|b| {
                    [0, 1].map(|x| {
                        let cell = self.rev_cell[b][x];
                        let actions = &self.g.infoset(cell).actions;
                        RevealRule {
                            weights: actions.iter().map(|&a| sigma.prob(cell, a)).collect(),
                            opens: actions.iter().map(|&a| a == self.open_act[b][x]).collect(),
                        }
                    })
                }),
            })
        } else {
            let actions = self.g.infoset(self.guess_cell).actions.clone();
            Box::new(LiftedGuesser {
                weights: actions.iter().map(|&a| sigma.prob(self.guess_cell, a)).collect(),
                bits: actions.iter().map(|&a| a == self.g_act[1]).collect(),
            })
        }
    }

    fn interpret(
        &self,
        player: usize,
        sigma: &BehavioralStrategy,
        view: &View,
        fresh: &BitString,
        _oracle: &mut Oracle,
    ) -> ActionId {
        if player == 1 {
            return sample_behavioral(&self.g, sigma, self.guess_cell, &mut BitReader::new(fresh));
        }
        if view.history.is_empty() {
            return sample_behavioral(&self.g, sigma, self.commit_cell, &mut BitReader::new(fresh));
        }
        let seg = view
            .consumed
            .as_ref()
            .and_then(|c| c.first())
            .expect("interpreting a reveal without the commit record");
        let mut rd = BitReader::new(seg);
        let committed = sample_behavioral(&self.g, sigma, self.commit_cell, &mut rd);
        let b = (committed == self.c_act[1]) as usize;
        let x = view.history[1].bit(0) as usize;
        sample_behavioral(&self.g, sigma, self.rev_cell[b][x], &mut BitReader::new(fresh))
    }

    fn view_entered_cell(
        &self,
        view: &View,
        cell: &[NodeId],
        oracle: &mut Oracle,
    ) -> Result<Option<usize>, CryptoError> {
        if cell.contains(&self.g.root()) {
            return Ok(Some(0));
        }
        if view.history.is_empty() {
            return Ok(None);
        }
        let pair = cell.contains(&self.commit_child[0]) && cell.contains(&self.commit_child[1]);
        let bit = if view.player == 0 { self.own_bit(view, oracle)? } else { None };
        if pair || bit.is_some_and(|b| cell.contains(&self.commit_child[b as usize])) {
            return Ok(Some(1));
        }
        if view.history.len() >= 2 {
            let x = view.history[1].bit(0) as usize;
            let col = cell.contains(&self.rev_node[0][x]) && cell.contains(&self.rev_node[1][x]);
            if col || bit.is_some_and(|b| cell.contains(&self.rev_node[b as usize][x])) {
                return Ok(Some(2));
            }
        }
        Ok(None)
    }
}

struct RevealRule {
    weights: Vec<Rational>,
    opens: Vec<bool>,
}

/// The honest lift of a committer strategy: commits with a fresh key, then
/// replays its consumed record to recover the bit and key at reveal time.
/// If the record is missing or does not parse (possible only when a wrapper
/// replaced the commit activation), it falls back to the all-zero key,
/// which destroys with overwhelming probability.
struct LiftedCommitter {
    commit_weights: Vec<Rational>,
    commit_bit: Vec<bool>,
    reveal: [[RevealRule; 2]; 2],
}

impl LiftedCommitter {
    fn replay_commit(&self, n: u32, view: &View) -> Option<(bool, BitString)> {
        let seg = view.consumed.as_ref()?.first()?;
        let mut rd = BitReader::new(seg);
        let i = sample_index(&mut rd, &self.commit_weights);
        if rd.remaining() < n as usize - 1 {
            return None;
        }
        Some((self.commit_bit[i], rd.take(n as usize - 1)))
    }
}

impl Machine for LiftedCommitter {
    fn kind(&self) -> MachineKind {
        MachineKind::Stateful
    }

    fn query_budget(&self, _n: u32) -> u64 {
        1
    }

    fn act(
        &self,
        view: &View,
        tape: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError> {
        let n = view.n;
        if view.history.is_empty() {
            let i = sample_index(tape, &self.commit_weights);
            let c = commit(oracle, n as u8, self.commit_bit[i], tape)?;
            return Ok(c.string);
        }
        let Some((bit, key)) = self.replay_commit(n, view) else {
            return Ok(BitString::zeros(n as usize - 1));
        };
        let rule = &self.reveal[bit as usize][view.history[1].bit(0) as usize];
        let i = sample_index(tape, &rule.weights);
        Ok(if rule.opens[i] { key } else { key.with_last_bit_flipped() })
    }
}

struct LiftedGuesser {
    weights: Vec<Rational>,
    bits: Vec<bool>,
}

impl Machine for LiftedGuesser {
    fn kind(&self) -> MachineKind {
        MachineKind::Stateless
    }

    fn query_budget(&self, _n: u32) -> u64 {
        0
    }

    fn act(
        &self,
        _view: &View,
        tape: &mut dyn BitSource,
        _oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError> {
        let i = sample_index(tape, &self.weights);
        Ok(BitString::from_u64(self.bits[i] as u64, 1))
    }
}

/// Stateless committer that always uses the all-zero key: it can reopen
/// without remembering anything, at the price of a commitment any replay
/// distinguisher cracks with one query.
pub struct ZeroKeyCommitter;

impl Machine for ZeroKeyCommitter {
    fn kind(&self) -> MachineKind {
        MachineKind::Stateless
    }

    fn query_budget(&self, _n: u32) -> u64 {
        1
    }

    fn act(
        &self,
        view: &View,
        tape: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError> {
        let n = view.n;
        if view.history.is_empty() {
            let bit = tape.take(1).bit(0);
            let image = oracle.forward(n as u8, bit as u64)?;
            return Ok(BitString::from_u64(image, n as usize));
        }
        Ok(BitString::zeros(n as usize - 1))
    }
}

/// Guesser that recommits both bits under the all-zero key and matches the
/// result against the viewed string. Against [`ZeroKeyCommitter`] it names
/// the committed bit every time.
pub struct ZeroKeyBreaker;

impl Machine for ZeroKeyBreaker {
    fn kind(&self) -> MachineKind {
        MachineKind::Stateless
    }

    fn query_budget(&self, _n: u32) -> u64 {
        2
    }

    fn act(
        &self,
        view: &View,
        _tape: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError> {
        let c = view.history[0].to_u64();
        for bit in [false, true] {
            if oracle.forward(view.n as u8, bit as u64)? == c {
                return Ok(BitString::from_u64(bit as u64, 1));
            }
        }
        Ok(BitString::from_u64(1, 1))
    }
}

/// Guesser that plays the first bit of the viewed commitment string; a
/// ciphertext-peeking deviation that hiding should render worthless.
pub struct FirstBitGuesser;

impl Machine for FirstBitGuesser {
    fn kind(&self) -> MachineKind {
        MachineKind::Stateless
    }

    fn query_budget(&self, _n: u32) -> u64 {
        0
    }

    fn act(
        &self,
        view: &View,
        _tape: &mut dyn BitSource,
        _oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError> {
        Ok(BitString::from_u64(view.history[0].bit(0) as u64, 1))
    }
}

/// The key-extraction attack: a guesser holding a copy of the committer it
/// is playing against. At its move it synthesizes the reveal view `(c, 1)`,
/// runs the copy on fresh randomness up to `n^2` times, and checks each
/// emitted string as a key via the receiver; the first valid key names the
/// committed bit, and on failure it guesses 1. Sound against stateless
/// committers, whose reveal behavior is a function of the view; against a
/// stateful committer the synthesized record is empty and the simulations
/// tell it nothing.
pub struct ExtractKeyAttack {
    m1: Box<dyn Machine>,
    commit_part: fn(u32, &BitString) -> BitString,
}

/// `commit_part` extracts the commitment string from the first raw action
/// (the whole action in the commitment family; a suffix in families that
/// prepend framing).
pub fn extract_key_attack(
    m1: Box<dyn Machine>,
    commit_part: fn(u32, &BitString) -> BitString,
) -> ExtractKeyAttack {
    ExtractKeyAttack { m1, commit_part }
}

impl Machine for ExtractKeyAttack {
    fn kind(&self) -> MachineKind {
        MachineKind::Stateless
    }

    fn query_budget(&self, n: u32) -> u64 {
        let sims = (n as u64).saturating_mul(n as u64);
        sims.saturating_mul(self.m1.query_budget(n).saturating_add(1)).saturating_add(4)
    }

    fn act(
        &self,
        view: &View,
        tape: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError> {
        let n = view.n;
        let c = (self.commit_part)(n, &view.history[0]);
        let synth = View {
            n,
            player: 0,
            history: vec![view.history[0].clone(), BitString::from_u64(1, 1)],
            consumed: None,
        };
        for _ in 0..(n as u64) * (n as u64) {
            let key = match self.m1.act(&synth, tape, oracle) {
                Ok(k) => k,
                Err(CryptoError::BudgetExceeded) => return Err(CryptoError::BudgetExceeded),
                Err(_) => continue,
            };
            if key.len() + 1 != c.len() {
                continue;
            }
            if let Reveal::Bit(b) = reveal(oracle, &c, &key)? {
                return Ok(BitString::from_u64(b as u64, 1));
            }
        }
        Ok(BitString::from_u64(1, 1))
    }
}

/// Committer strategy: commit 1 with probability `commit1`, open at the
/// `(bit, guess)` reveal set with probability `open[bit][guess]`.
pub fn committer_sigma(g: &GameTree, commit1: Rational, open: [[Rational; 2]; 2]) -> BehavioralStrategy {
    let mut dists = std::collections::BTreeMap::new();
    let commit_cell = g.infoset_by_label("commit").unwrap();
    let one = Rational::from_integer(1.into());
    dists.insert(
        commit_cell,
        vec![
            (g.action_by_label("c0").unwrap(), one.clone() - commit1.clone()),
            (g.action_by_label("c1").unwrap(), commit1),
        ],
    );
    for b in 0..2usize {
        for x in 0..2usize {
            let p = open[b][x].clone();
            dists.insert(
                g.infoset_by_label(&format!("rev{b}{x}")).unwrap(),
                vec![
                    (g.action_by_label(&format!("open{b}{x}")).unwrap(), p.clone()),
                    (g.action_by_label(&format!("destroy{b}{x}")).unwrap(), one.clone() - p),
                ],
            );
        }
    }
    BehavioralStrategy { player: 0, dists }
}

/// Guesser strategy: guess 1 with probability `guess1`.
pub fn guesser_sigma(g: &GameTree, guess1: Rational) -> BehavioralStrategy {
    let one = Rational::from_integer(1.into());
    let dists = [(
        g.infoset_by_label("guess").unwrap(),
        vec![
            (g.action_by_label("g0").unwrap(), one - guess1.clone()),
            (g.action_by_label("g1").unwrap(), guess1),
        ],
    )]
    .into_iter()
    .collect();
    BehavioralStrategy { player: 1, dists }
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn always_open() -> [[Rational; 2]; 2] {
    let one = Rational::from_integer(1.into());
    [[one.clone(), one.clone()], [one.clone(), one]]
}

/// The uniform equilibrium: commit uniformly, always open, guess uniformly.
pub fn fig1_uniform_profile(g: &GameTree) -> Vec<BehavioralStrategy> {
    vec![committer_sigma(g, half(), always_open()), guesser_sigma(g, half())]
}

/// A deliberately unbalanced non-equilibrium: always commit 1 and open,
/// always guess 0. Switching the guess to 1 gains the full stake.
pub fn fig1_control_profile(g: &GameTree) -> Vec<BehavioralStrategy> {
    vec![
        committer_sigma(g, Rational::from_integer(1.into()), always_open()),
        guesser_sigma(g, Rational::from_integer(0.into())),
    ]
}

/// Named behavioral profiles exercising distinct branches and mixtures, for
/// outcome-correspondence measurements.
pub fn fig1_profiles(g: &GameTree) -> Vec<(String, Vec<BehavioralStrategy>)> {
    let one = Rational::from_integer(1.into());
    let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let open_if_match = [[one.clone(), q(1, 4)], [q(1, 4), one.clone()]];
    vec![
        ("uniform-open".into(), fig1_uniform_profile(g)),
        (
            "skew-commit".into(),
            vec![committer_sigma(g, q(3, 4), always_open()), guesser_sigma(g, half())],
        ),
        (
            "pure-one".into(),
            vec![committer_sigma(g, one.clone(), always_open()), guesser_sigma(g, half())],
        ),
        (
            "biased-guess".into(),
            vec![committer_sigma(g, half(), always_open()), guesser_sigma(g, q(2, 3))],
        ),
        (
            "half-destroy".into(),
            vec![
                committer_sigma(g, half(), [[half(), half()], [half(), half()]]),
                guesser_sigma(g, half()),
            ],
        ),
        (
            "spite".into(),
            vec![committer_sigma(g, q(1, 3), open_if_match), guesser_sigma(g, q(1, 3))],
        ),
    ]
}

/// The standard deviation battery: four committer and four guesser
/// deviations, including the low-entropy-key profile and the
/// key-extraction attack.
pub fn commitment_battery(rep: &CommitRep) -> DeviationBattery {
    let g = rep.game();
    let one = Rational::from_integer(1.into());
    let zero = Rational::from_integer(0.into());
    let mut battery = DeviationBattery::new(2, "commitment-battery-v1");
    battery.push(0, "commit-zero", rep.lift(0, &committer_sigma(g, zero.clone(), always_open())));
    battery.push(0, "commit-one", rep.lift(0, &committer_sigma(g, one.clone(), always_open())));
    battery.push(
        0,
        "always-destroy",
        rep.lift(0, &committer_sigma(g, half(), [[zero.clone(), zero.clone()], [zero.clone(), zero]])),
    );
    battery.push(0, "zero-key", Box::new(ZeroKeyCommitter));
    battery.push(1, "guess-zero", rep.lift(1, &guesser_sigma(g, Rational::from_integer(0.into()))));
    battery.push(1, "guess-one", rep.lift(1, &guesser_sigma(g, one)));
    battery.push(1, "first-bit", Box::new(FirstBitGuesser));
    battery.push(
        1,
        "extract-key",
        Box::new(extract_key_attack(
            rep.lift(0, &committer_sigma(g, half(), always_open())),
            |_, h0| h0.clone(),
        )),
    );
    battery
}

/// Tuning for the commitment pipeline. `n_list` drives correspondence and
/// equilibrium ladders; the partition check gets its own ladder because its
/// guarantee is about decay between consecutive sizes.
pub struct CommitmentRunConfig {
    pub n_list: Vec<u32>,
    pub partition_n_list: Vec<u32>,
    pub trials: u64,
    pub ne_trials: u64,
    pub partition_trials: u64,
    pub corr_tol: f64,
    pub decay_tol: f64,
    pub seed: u64,
}

impl CommitmentRunConfig {
    pub fn standard(seed: u64) -> CommitmentRunConfig {
        CommitmentRunConfig {
            n_list: vec![8, 16, 32],
            partition_n_list: vec![16, 24, 32],
            trials: 100_000,
            ne_trials: 20_000,
            partition_trials: 20_000,
            corr_tol: 0.02,
            decay_tol: 0.05,
            seed,
        }
    }

    /// Scale every trial count down for smoke runs.
    pub fn scaled(mut self, f: u64) -> CommitmentRunConfig {
        assert!(f > 0);
        self.trials /= f;
        self.ne_trials /= f;
        self.partition_trials /= f;
        self
    }
}

const EXP: &str = "commitment";

/// Exhaustive perfect-binding check at width `k`: every string decommits to
/// exactly one `(key, bit)`, the true key opens it to the committed bit,
/// and every other key fails.
pub fn binding_exhaustive(k: u8, seed: u64) -> bool {
    let mut perm = PermTable::new(seed);
    let mut seen = vec![false; 1usize << k];
    for point in 0..1u64 << k {
        let image = perm.forward(k, point);
        if seen[image as usize] {
            return false;
        }
        seen[image as usize] = true;
        let c = BitString::from_u64(image, k as usize);
        let (key, bit) = committed_bit(&mut perm, &c);
        if key.to_u64() != point >> 1 || bit != (point & 1 == 1) {
            return false;
        }
        for other in 0..1u64 << (k - 1) {
            let mut meter = crate::crypto::QueryMeter::unbounded();
            let mut oracle = Oracle::new(&mut perm, &mut meter);
            let got =
                reveal(&mut oracle, &c, &BitString::from_u64(other, k as usize - 1)).unwrap();
            let want = if other == key.to_u64() { Reveal::Bit(bit) } else { Reveal::Fail };
            if got != want {
                return false;
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Commitment-scheme rows: exhaustive binding at small widths, the hiding
/// experiment against the standard suite at width 32, and the unbounded
/// inverter at width 10.
pub fn run_commitment_scheme_rows(trials: u64, seed: u64) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for k in 2..=8u8 {
        rows.push(ResultRow::check(
            EXP,
            Some(k as u32),
            "binding-exhaustive",
            "all-strings-all-keys",
            binding_exhaustive(k, derive(seed, 0xB0 + k as u64)),
        ));
    }

    let x = CommitSampler { bit: false };
    let y = CommitSampler { bit: true };
    let q = 1u64 << 10;
    let bound = hiding_advantage_bound(32, q).to_f64().unwrap();
    for d in standard_suite(q) {
        let row = estimate_advantage(d.as_ref(), &x, &y, 32, trials, derive(seed, 0xB20))
            .expect("width 32 sampling cannot fail");
        rows.push(ResultRow::at_most(
            EXP,
            Some(32),
            "hiding-advantage",
            &row.distinguisher,
            row.advantage,
            row.radius,
            bound + 3.0 * row.radius,
        ));
    }

    let exhaustive = Enumerate::new(1 << 9);
    let row = estimate_advantage(&exhaustive, &x, &y, 10, trials.min(20_000), derive(seed, 0xB21))
        .expect("width 10 sampling cannot fail");
    rows.push(ResultRow::at_least(
        EXP,
        Some(10),
        "inverter-advantage",
        &row.distinguisher,
        row.advantage,
        row.radius,
        0.99,
    ));
    rows
}

/// The full zero-sum commitment pipeline: representation checks, outcome
/// correspondence, the lifted equilibrium against the battery, the non-NE
/// control, and partition consistency for the honest and low-entropy
/// profiles.
pub fn run_commitment_experiment(cfg: &CommitmentRunConfig) -> Vec<ResultRow> {
    let rep = build_commitment_game();
    let g = rep.game();
    let seed = cfg.seed;
    let mut rows = run_commitment_scheme_rows(cfg.trials, derive(seed, 1));

    let structure = verify_structure(&rep, 8, VerifyMode::Exhaustive { cap: 200_000 }, &[], derive(seed, 2));
    rows.push(ResultRow::check(EXP, Some(8), "structure", "exhaustive", structure.pass()));
    let utilities = verify_utilities(&rep, 8, VerifyMode::Exhaustive { cap: 200_000 }, &[], derive(seed, 3));
    rows.push(ResultRow::check(EXP, Some(8), "utilities", "exhaustive", utilities.pass()));

    let profiles = fig1_profiles(g);
    let correspondence =
        verify_outcome_correspondence(&rep, &profiles, &cfg.n_list, cfg.trials, cfg.corr_tol, derive(seed, 4));
    for r in &correspondence.rows {
        rows.push(ResultRow::at_most(
            EXP,
            Some(r.n),
            "correspondence-l1",
            &r.profile,
            r.l1,
            r.radius,
            r.threshold,
        ));
    }

    let interp = verify_interpreters(&rep, &fig1_uniform_profile(g), 8, 10_000, derive(seed, 5));
    rows.push(ResultRow::check(
        EXP,
        Some(8),
        "interpreter-mismatches",
        "uniform-open",
        interp.pass(),
    ));

    let battery = commitment_battery(&rep);
    let lifted = lift_ne(
        &rep,
        &fig1_uniform_profile(g),
        &battery,
        &cfg.n_list,
        cfg.ne_trials,
        cfg.corr_tol,
        cfg.decay_tol,
        derive(seed, 6),
    );
    match lifted {
        Ok((_, report)) => {
            rows.push(ResultRow::check(EXP, None, "exact-ne", "uniform-open", true));
            for r in &report.ne.rows {
                rows.push(ResultRow::at_most(
                    EXP,
                    Some(r.n),
                    "ne-gain",
                    &format!("p{}:{}", r.player + 1, r.deviation),
                    r.gain,
                    r.radius,
                    cfg.decay_tol + 3.0 * r.radius,
                ));
            }
            for v in &report.ne.verdicts {
                rows.push(ResultRow::check(
                    EXP,
                    None,
                    "ne-ladder",
                    &format!("p{}:{}", v.player + 1, v.deviation),
                    v.pass,
                ));
            }
            rows.push(ResultRow::check(EXP, None, "lifted-ne", "uniform-open", report.pass()));
        }
        Err(_) => {
            rows.push(ResultRow::check(EXP, None, "exact-ne", "uniform-open", false));
        }
    }

    let control_sigma = fig1_control_profile(g);
    let control = lift_profile(&rep, &control_sigma);
    let control_report = check_computational_ne(
        rep.family(),
        &machine_refs(&control),
        &battery,
        &cfg.n_list,
        cfg.ne_trials,
        cfg.decay_tol,
        derive(seed, 7),
    );
    rows.push(ResultRow::check(EXP, None, "control-rejected", "commit-one/guess-zero", !control_report.pass()));
    let top = *cfg.n_list.last().unwrap();
    let control_gain = control_report
        .rows
        .iter()
        .filter(|r| r.player == 1 && r.deviation == "guess-one" && r.n == top)
        .map(|r| r.gain)
        .next()
        .unwrap_or(f64::MIN);
    rows.push(ResultRow::at_least(
        EXP,
        Some(top),
        "control-gain",
        "p2:guess-one",
        control_gain,
        0.0,
        1.0,
    ));

    let partition = game_partition(g);
    let honest = lift_profile(&rep, &fig1_uniform_profile(g));
    let honest_report = check_consistent_partition(
        &rep,
        &machine_refs(&honest),
        &partition,
        &standard_suite(256),
        &cfg.partition_n_list,
        cfg.partition_trials,
        cfg.decay_tol,
        40 * cfg.partition_trials,
        derive(seed, 8),
    );
    rows.push(ResultRow::check(EXP, None, "partition-consistent", "uniform-open", honest_report.pass()));
    let top_p = *cfg.partition_n_list.last().unwrap();
    for v in &honest_report.verdicts {
        let worst = honest_report
            .rows
            .iter()
            .filter(|r| r.cell == v.cell && r.member == v.member && r.n == top_p)
            .map(|r| (r.advantage, r.radius))
            .fold((0.0f64, 0.0f64), |a, b| if b.0 > a.0 { b } else { a });
        rows.push(ResultRow::at_most(
            EXP,
            Some(top_p),
            "partition-advantage",
            &format!("{}@{}", v.cell, v.member),
            worst.0,
            worst.1,
            cfg.decay_tol + 3.0 * worst.1,
        ));
    }

    let cheat: Vec<Box<dyn Machine>> = vec![Box::new(ZeroKeyCommitter), Box::new(ZeroKeyBreaker)];
    let cheat_report = check_consistent_partition(
        &rep,
        &machine_refs(&cheat),
        &partition,
        &standard_suite(256),
        &cfg.partition_n_list,
        cfg.partition_trials,
        cfg.decay_tol,
        40 * cfg.partition_trials,
        derive(seed, 9),
    );
    rows.push(ResultRow::check(EXP, None, "cheat-rejected", "zero-key", !cheat_report.pass()));
    let replay_adv = cheat_report
        .rows
        .iter()
        .filter(|r| r.distinguisher == "replay-zero-key" && r.n == top_p)
        .map(|r| r.advantage)
        .fold(0.0f64, f64::max);
    rows.push(ResultRow::at_least(
        EXP,
        Some(top_p),
        "cheat-replay-advantage",
        "zero-key",
        replay_adv,
        0.0,
        0.9,
    ));

    rows
}

/// The coordination variant: its three abstract equilibria scored exactly,
/// and the zero-key profile earning the coordinated payoff that no abstract
/// strategy of the variant achieves against a hidden uniform commit.
pub fn run_variant_prime_experiment(n: u32, trials: u64, seed: u64) -> Vec<ResultRow> {
    const VEXP: &str = "variant-prime";
    let rep = build_variant_prime();
    let g = rep.game();
    let mut rows = Vec::new();

    let one = Rational::from_integer(1.into());
    let zero = Rational::from_integer(0.into());
    let named: [(&str, Rational, Rational, i64); 3] = [
        ("both-zero", zero.clone(), zero.clone(), 1),
        ("both-one", one.clone(), one.clone(), 1),
        ("mixed-half", half(), half(), 0),
    ];
    for (name, c1, g1, u2) in named {
        let profile = StrategyProfile::new(vec![
            Strategy::Behavioral(committer_sigma(g, c1, always_open())),
            Strategy::Behavioral(guesser_sigma(g, g1)),
        ]);
        let report = check_epsilon_ne(g, &profile, &Rational::from_integer(0.into())).unwrap();
        rows.push(ResultRow::check(VEXP, None, "abstract-ne", name, report.is_ne()));
        let value = expected_utility(g, &profile, 1).unwrap().to_f64().unwrap();
        rows.push(ResultRow::at_least(VEXP, None, "abstract-ne-guesser-payoff", name, value, 0.0, u2 as f64));
    }

    // Against a hidden uniform commit the guesser matches with probability
    // 1/2 whatever it does, so its best abstract payoff is 0.
    let uniform_committer = StrategyProfile::new(vec![
        Strategy::Behavioral(committer_sigma(g, half(), always_open())),
        Strategy::Behavioral(guesser_sigma(g, half())),
    ]);
    let ne0 = check_epsilon_ne(g, &uniform_committer, &Rational::from_integer(0.into())).unwrap();
    let best_abstract = ne0.gains[1].best.to_f64().unwrap();
    rows.push(ResultRow::at_most(
        VEXP,
        None,
        "abstract-best-vs-uniform",
        "guesser",
        best_abstract,
        0.0,
        0.0,
    ));

    let cheat: Vec<Box<dyn Machine>> = vec![Box::new(ZeroKeyCommitter), Box::new(ZeroKeyBreaker)];
    let u = crate::machine::empirical_utilities(rep.family(), n, &machine_refs(&cheat), trials, derive(seed, 1));
    rows.push(ResultRow::at_least(VEXP, Some(n), "cheat-guesser-payoff", "zero-key", u[1], 0.0, 1.0));
    rows.push(ResultRow::at_least(VEXP, Some(n), "cheat-committer-payoff", "zero-key", u[0], 0.0, 1.0));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::QueryMeter;
    use crate::machine::{empirical_utilities, run_game_full};

    #[test]
    fn the_tree_has_the_fifteen_nodes_and_six_cells() {
        let g = fig1_game();
        assert_eq!(g.num_nodes(), 15);
        assert_eq!(g.num_infosets(), 6);
        let u = |labels: &[&str]| {
            let node = g.node_by_labels(labels).unwrap();
            g.utilities(node).to_vec()
        };
        assert_eq!(u(&["c1", "g0", "open10"]), vec![rat(1), rat(-1)]);
        assert_eq!(u(&["c1", "g1", "open11"]), vec![rat(-1), rat(1)]);
        assert_eq!(u(&["c0", "g1", "destroy01"]), vec![rat(-1), rat(1)]);
        let gp = variant_prime_game();
        let up = |labels: &[&str]| {
            let node = gp.node_by_labels(labels).unwrap();
            gp.utilities(node).to_vec()
        };
        assert_eq!(up(&["c1", "g1", "open11"]), vec![rat(1), rat(1)]);
        assert_eq!(up(&["c1", "g0", "open10"]), vec![rat(-1), rat(-1)]);
        assert_eq!(up(&["c0", "g1", "destroy01"]), vec![rat(-1), rat(-1)]);
    }

    #[test]
    fn the_history_map_follows_the_permutation() {
        let rep = build_commitment_game();
        let n = 4u32;
        let mut perm = PermTable::new(99);
        for point in 0..16u64 {
            let bit = point & 1 == 1;
            let key = BitString::from_u64(point >> 1, 3);
            let c = BitString::from_u64(perm.forward(4, point), 4);
            let node = rep.map_history(n, std::slice::from_ref(&c), &mut perm);
            assert_eq!(node, rep.commit_child[bit as usize]);
            for guess in [false, true] {
                let h2 = vec![c.clone(), BitString::from_u64(guess as u64, 1)];
                assert_eq!(rep.map_history(n, &h2, &mut perm), rep.rev_node[bit as usize][guess as usize]);
                let mut open = h2.clone();
                open.push(key.clone());
                let t = rep.map_history(n, &open, &mut perm);
                let label = rep.g.action_label(rep.g.last_action(t).unwrap());
                assert!(label.starts_with("open"), "true key must open, got {label}");
                let mut wrong = h2.clone();
                wrong.push(key.with_last_bit_flipped());
                let t = rep.map_history(n, &wrong, &mut perm);
                let label = rep.g.action_label(rep.g.last_action(t).unwrap());
                assert!(label.starts_with("destroy"), "wrong key must destroy, got {label}");
            }
        }
    }

    #[test]
    fn the_representation_passes_its_own_verifiers_small() {
        let rep = build_commitment_game();
        let s = verify_structure(&rep, 4, VerifyMode::Exhaustive { cap: 10_000 }, &[], 1);
        assert!(s.pass(), "{:?}", s.violations);
        assert_eq!(s.surjective, Some(true));
        let u = verify_utilities(&rep, 4, VerifyMode::Exhaustive { cap: 10_000 }, &[], 2);
        assert!(u.pass(), "{:?}", u.mismatches);
        let i = verify_interpreters(&rep, &fig1_uniform_profile(rep.game()), 4, 400, 3);
        assert!(i.pass(), "{:?}", i.mismatches);
    }

    #[test]
    fn correspondence_spans_the_profile_list() {
        let rep = build_commitment_game();
        let profiles = fig1_profiles(rep.game());
        assert!(profiles.len() >= 5);
        let report = verify_outcome_correspondence(&rep, &profiles, &[4, 6], 4_000, 0.02, 5);
        for r in &report.rows {
            assert!(r.pass, "{} at n={}: l1={}", r.profile, r.n, r.l1);
            assert_eq!(r.forfeits, 0);
        }
    }

    #[test]
    fn the_uniform_profile_is_an_exact_equilibrium_and_the_control_is_not() {
        let g = fig1_game();
        let zero = Rational::from_integer(0.into());
        let uniform = StrategyProfile::new(
            fig1_uniform_profile(&g).into_iter().map(Strategy::Behavioral).collect(),
        );
        assert!(check_epsilon_ne(&g, &uniform, &zero).unwrap().is_ne());
        let control = StrategyProfile::new(
            fig1_control_profile(&g).into_iter().map(Strategy::Behavioral).collect(),
        );
        let report = check_epsilon_ne(&g, &control, &zero).unwrap();
        assert!(!report.is_ne());
        assert_eq!(report.max_gain(), rat(2));
    }

    #[test]
    fn zero_key_cheat_coordinates_perfectly_in_the_variant() {
        let rep = build_variant_prime();
        let cheat: Vec<Box<dyn Machine>> = vec![Box::new(ZeroKeyCommitter), Box::new(ZeroKeyBreaker)];
        let u = empirical_utilities(rep.family(), 8, &machine_refs(&cheat), 400, 11);
        assert_eq!(u, vec![1.0, 1.0], "the breaker recovers the bit every run");
    }

    #[test]
    fn extract_key_defeats_the_stateless_zero_key_committer() {
        let rep = build_commitment_game();
        let attack = extract_key_attack(Box::new(ZeroKeyCommitter), |_, h0| h0.clone());
        let profile: Vec<Box<dyn Machine>> = vec![Box::new(ZeroKeyCommitter), Box::new(attack)];
        let u = empirical_utilities(rep.family(), 8, &machine_refs(&profile), 400, 13);
        assert_eq!(u, vec![-1.0, 1.0], "a recovered key pins the guess to the bit");
    }

    #[test]
    fn extract_key_learns_nothing_from_the_stateful_honest_committer() {
        let rep = build_commitment_game();
        let g = rep.game();
        let honest = rep.lift(0, &committer_sigma(g, half(), always_open()));
        let attack = extract_key_attack(
            rep.lift(0, &committer_sigma(g, half(), always_open())),
            |_, h0| h0.clone(),
        );
        let profile: Vec<&dyn Machine> = vec![honest.as_ref(), &attack];
        let u = empirical_utilities(rep.family(), 8, &profile, 4_000, 17);
        // The guess degrades to a coin flip against the committed bit.
        assert!(u[1].abs() < 0.1, "guesser payoff {} should hover near zero", u[1]);
    }

    #[test]
    fn reveal_cells_are_detected_from_the_committers_own_view() {
        let rep = build_commitment_game();
        let machines = lift_profile(&rep, &fig1_uniform_profile(rep.game()));
        let refs = machine_refs(&machines);
        for seed in 0..20 {
            let (t, mut perm) = run_game_full(rep.family(), 6, &refs, seed);
            let h = t.outcome.terminal_history().unwrap();
            let (_, bit) = committed_bit(&mut perm, &h[0]);
            let b = bit as usize;
            let x = h[1].bit(0) as usize;
            let reveal_view = &t.activations[2].view;
            let mut meter = QueryMeter::with_budget(16);
            let mut oracle = Oracle::new(&mut perm, &mut meter);
            let own = [rep.rev_node[b][x]];
            let other = [rep.rev_node[1 - b][x]];
            assert_eq!(rep.view_entered_cell(reveal_view, &own, &mut oracle).unwrap(), Some(2));
            assert_eq!(rep.view_entered_cell(reveal_view, &other, &mut oracle).unwrap(), None);
            // The guesser's view cannot split the commit pair.
            let guess_view = &t.activations[1].view;
            let one_sided = [rep.commit_child[0]];
            assert_eq!(rep.view_entered_cell(guess_view, &one_sided, &mut oracle).unwrap(), None);
            let pair = [rep.commit_child[0], rep.commit_child[1]];
            assert_eq!(rep.view_entered_cell(guess_view, &pair, &mut oracle).unwrap(), Some(1));
        }
    }

    #[test]
    fn binding_is_exhaustive_at_small_widths() {
        assert!(binding_exhaustive(2, 7));
        assert!(binding_exhaustive(4, 8));
        assert!(binding_exhaustive(6, 9));
    }

    #[test]
    fn variant_prime_rows_separate_cheat_from_abstract_play() {
        let rows = run_variant_prime_experiment(8, 400, 23);
        assert!(super::super::all_pass(&rows), "{:?}", rows.iter().filter(|r| !r.pass).collect::<Vec<_>>());
        let cheat = rows.iter().find(|r| r.metric == "cheat-guesser-payoff").unwrap();
        assert_eq!(cheat.value, 1.0);
        let best = rows.iter().find(|r| r.metric == "abstract-best-vs-uniform").unwrap();
        assert_eq!(best.value, 0.0);
    }

    #[test]
    fn the_pipeline_rows_are_deterministic() {
        let cfg = CommitmentRunConfig {
            n_list: vec![4, 6],
            partition_n_list: vec![4, 6],
            trials: 300,
            ne_trials: 300,
            partition_trials: 300,
            corr_tol: 0.2,
            decay_tol: 0.3,
            seed: 31,
        };
        let a = run_commitment_experiment(&cfg);
        let b = run_commitment_experiment(&cfg);
        assert_eq!(super::super::rows_to_csv(&a), super::super::rows_to_csv(&b));
        assert!(!a.is_empty());
    }
}

//! Representations: the bridge between a computational game family and the
//! finite game it stands for.
//!
//! A representation supplies, for every size `n`, a total history map `f_n`
//! from the family's histories onto the finite game's histories, a lift `F`
//! turning an abstract strategy into a machine, and per-strategy action
//! interpreters that name the abstract action a lifted machine just took.
//! The verifiers in this module check the structural conditions (lengths,
//! movers, prefix order, information sets, last actions), exact utility
//! agreement, statistical outcome correspondence, and interpreter agreement.
//!
//! History maps and utilities may invert the permutation: they run on the
//! trusted verifier side, never inside a budgeted machine.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::ToPrimitive;
use rayon::prelude::*;

use crate::bits::{BitSource, BitString};
use crate::crypto::{CryptoError, Oracle, PermTable, QueryMeter};
use crate::game::{
    outcome_distribution, ActionId, BehavioralStrategy, GameTree, InfoSetId, NodeId,
    OutcomeDistribution, Strategy, StrategyProfile,
};
use crate::machine::{
    enumerate_histories, run_game_full, EmpiricalDistribution, GameFamily, Machine, Outcome, View,
};
use crate::seeding::{derive, tags};
use crate::stats::hoeffding_radius;
use crate::tape::{sample_below, sample_index, RandomTape};

pub trait Represent: Sync {
    /// The finite game being represented.
    fn game(&self) -> &GameTree;

    /// The representing family.
    fn family(&self) -> &dyn GameFamily;

    /// `f_n`: total map from histories of the size-`n` game to histories
    /// (nodes) of the finite game. May invert the permutation.
    fn map_history(&self, n: u32, h: &[BitString], perm: &mut PermTable) -> NodeId;

    /// `F`: lift one player's behavioral strategy to a machine. Mixed and
    /// deterministic strategies enter through their behavioral form.
    fn lift(&self, player: usize, sigma: &BehavioralStrategy) -> Box<dyn Machine>;

    /// The interpreter of the lifted strategy: from the view a machine was
    /// shown and the fresh randomness it consumed in that activation, name
    /// the abstract action its emitted action maps to. The interpreter runs
    /// machine-side: it may query the oracle (for example to check which
    /// revealed keys verify), paying against the verifier-granted
    /// [`INTERPRETER_QUERY_ALLOWANCE`], but it never touches the permutation
    /// table directly.
    fn interpret(
        &self,
        player: usize,
        sigma: &BehavioralStrategy,
        view: &View,
        fresh: &BitString,
        oracle: &mut Oracle,
    ) -> ActionId;

    /// Machine-side cell detection for switch deviations: the first prefix
    /// length `j` such that the viewed history's first `j` actions image
    /// into `cell`, judged from the view plus ordinary oracle access (the
    /// queries charge whatever meter the caller is running under). `None`
    /// when no viewed prefix is in the cell; the default resolves nothing.
    /// Representations used with switch machines override this for the cells
    /// their players' views actually determine. A cell that the owner's view
    /// cannot determine is undetectable by construction, and a switch
    /// conditioned on it stays on its base machine.
    fn view_entered_cell(
        &self,
        view: &View,
        cell: &[NodeId],
        oracle: &mut Oracle,
    ) -> Result<Option<usize>, CryptoError> {
        let _ = (view, cell, oracle);
        Ok(None)
    }
}

/// Lift a full behavioral profile.
pub fn lift_profile(rep: &dyn Represent, profile: &[BehavioralStrategy]) -> Vec<Box<dyn Machine>> {
    profile
        .iter()
        .enumerate()
        .map(|(p, s)| {
            assert_eq!(s.player, p, "profile slot {p} holds another player's strategy");
            rep.lift(p, s)
        })
        .collect()
}

pub fn machine_refs(machines: &[Box<dyn Machine>]) -> Vec<&dyn Machine> {
    machines.iter().map(|b| b.as_ref()).collect()
}

/// Draw an action at `infoset` according to `sigma`, consuming bits in the
/// cell's declared action order. Lifted machines and their interpreters must
/// sample through this one routine so a replayed tape reproduces the draw.
pub fn sample_behavioral(
    g: &GameTree,
    sigma: &BehavioralStrategy,
    infoset: InfoSetId,
    src: &mut dyn BitSource,
) -> ActionId {
    let actions = &g.infoset(infoset).actions;
    let weights: Vec<_> = actions.iter().map(|&a| sigma.prob(infoset, a)).collect();
    actions[sample_index(src, &weights)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Walk every history; only valid while the game fits under `cap`.
    Exhaustive { cap: usize },
    /// Sample histories, half from honest-profile runs and half from uniform
    /// random legal walks.
    Sampled { trials: u64 },
}

const MAX_LISTED: usize = 20;

fn show_history(h: &[BitString]) -> String {
    if h.is_empty() {
        "<root>".to_string()
    } else {
        h.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("/")
    }
}

#[derive(Debug, Clone)]
pub struct StructureReport {
    pub n: u32,
    pub histories_checked: u64,
    /// Whether `f_n` hits every history of the finite game; only exhaustive
    /// verification can decide this.
    pub surjective: Option<bool>,
    pub violations: Vec<String>,
    pub violations_total: u64,
}

impl StructureReport {
    pub fn pass(&self) -> bool {
        self.violations_total == 0
    }
}

struct Noter {
    listed: Vec<String>,
    total: u64,
}

impl Noter {
    fn new() -> Self {
        Noter { listed: Vec::new(), total: 0 }
    }

    fn note(&mut self, msg: String) {
        self.total += 1;
        if self.listed.len() < MAX_LISTED {
            self.listed.push(msg);
        }
    }
}

/// Per-history structural conditions against the image under `perm`:
/// length agreement, terminal agreement, same mover, and the parent of the
/// image being the image of the parent. Uncached, so callers may hand each
/// trial its own permutation.
fn check_basic(rep: &dyn Represent, n: u32, h: &[BitString], perm: &mut PermTable, out: &mut Noter) {
    let g = rep.game();
    let family = rep.family();
    let m = rep.map_history(n, h, perm);
    if g.depth(m) != h.len() {
        out.note(format!(
            "length: {} has {} action(s) but maps to depth {}",
            show_history(h),
            h.len(),
            g.depth(m)
        ));
    }
    let terminal_here = family.is_terminal(n, h);
    if terminal_here != g.is_terminal(m) {
        out.note(format!(
            "terminal agreement: {} is {}terminal but its image {} is {}terminal",
            show_history(h),
            if terminal_here { "" } else { "non" },
            g.display_history(m),
            if g.is_terminal(m) { "" } else { "non" },
        ));
    } else if !terminal_here {
        let mover = family.player(n, h);
        if g.player_at(m) != Some(mover) {
            out.note(format!(
                "mover: player {} moves at {} but player {:?} moves at its image",
                mover + 1,
                show_history(h),
                g.player_at(m).map(|p| p + 1)
            ));
        }
    }
    if !h.is_empty() {
        let pm = rep.map_history(n, &h[..h.len() - 1], perm);
        if g.node(m).parent != Some(pm) {
            out.note(format!(
                "prefix order: dropping the last action of {} does not step to the image's parent",
                show_history(h)
            ));
        }
    }
}

/// Cross-history information-set conditions. These accumulate over every
/// call, so one checker must only ever see one audit permutation.
struct StructureChecker<'a> {
    rep: &'a dyn Represent,
    n: u32,
    /// Image cache under the audit permutation.
    cache: HashMap<Vec<BitString>, NodeId>,
    /// Information set each family-side cell maps into (information-set
    /// preservation).
    cell_infoset: BTreeMap<(usize, Vec<BitString>), (InfoSetId, String)>,
    /// Abstract action induced by a concrete action at a cell (last-action
    /// condition).
    cell_action: BTreeMap<(usize, Vec<BitString>, BitString), (ActionId, String)>,
}

impl<'a> StructureChecker<'a> {
    fn new(rep: &'a dyn Represent, n: u32) -> Self {
        StructureChecker {
            rep,
            n,
            cache: HashMap::new(),
            cell_infoset: BTreeMap::new(),
            cell_action: BTreeMap::new(),
        }
    }

    fn map(&mut self, h: &[BitString], perm: &mut PermTable) -> NodeId {
        if let Some(&m) = self.cache.get(h) {
            return m;
        }
        let m = self.rep.map_history(self.n, h, perm);
        self.cache.insert(h.to_vec(), m);
        m
    }

    fn check_cells(
        &mut self,
        h: &[BitString],
        actions: &[BitString],
        perm: &mut PermTable,
        out: &mut Noter,
    ) {
        let g = self.rep.game();
        let family = self.rep.family();
        if family.is_terminal(self.n, h) {
            return;
        }
        let mover = family.player(self.n, h);
        let key = (mover, family.view_component(self.n, h));
        let m = self.map(h, perm);
        if let Some(cell) = g.infoset_at(m) {
            match self.cell_infoset.get(&key) {
                None => {
                    self.cell_infoset.insert(key.clone(), (cell, show_history(h)));
                }
                Some((other, first)) if *other != cell => {
                    out.note(format!(
                        "information sets: {} and {} share a view but map into {} and {}",
                        first,
                        show_history(h),
                        g.infoset(*other).label,
                        g.infoset(cell).label
                    ));
                }
                Some(_) => {}
            }
        }
        for a in actions {
            let mut next = h.to_vec();
            next.push(a.clone());
            if !family.is_history(self.n, &next) {
                continue;
            }
            let child = self.map(&next, perm);
            let Some(la) = g.last_action(child) else {
                out.note(format!(
                    "last action: image of {} has no last action",
                    show_history(&next)
                ));
                continue;
            };
            let akey = (key.0, key.1.clone(), a.clone());
            match self.cell_action.get(&akey) {
                None => {
                    self.cell_action.insert(akey, (la, show_history(h)));
                }
                Some((other, first)) if *other != la => {
                    out.note(format!(
                        "last action: action {} maps to {} after {} but to {} after {}",
                        a,
                        g.action_label(*other),
                        first,
                        g.action_label(la),
                        show_history(h)
                    ));
                }
                Some(_) => {}
            }
        }
    }
}

/// Check the structural representation conditions at size `n`.
///
/// Exhaustive mode enumerates every history under one audited permutation
/// and additionally decides surjectivity. Sampled mode draws histories half
/// from runs of `honest` and half from uniform legal walks; per-history
/// conditions are checked under each trial's own permutation, while the
/// cross-history cell conditions are audited under one fixed permutation.
pub fn verify_structure(
    rep: &dyn Represent,
    n: u32,
    mode: VerifyMode,
    honest: &[&dyn Machine],
    seed: u64,
) -> StructureReport {
    let family = rep.family();
    let g = rep.game();
    let mut out = Noter::new();
    let mut checker = StructureChecker::new(rep, n);
    let mut checked = 0u64;
    let mut surjective = None;

    match mode {
        VerifyMode::Exhaustive { cap } => {
            let mut perm = PermTable::new(derive(seed, tags::PERM));
            let all = enumerate_histories(family, n, cap);
            for h in &all {
                checked += 1;
                check_basic(rep, n, h, &mut perm, &mut out);
                if !family.is_terminal(n, h) {
                    let actions = family.enumerate_actions(n, h);
                    if actions.len() < 2 {
                        out.note(format!(
                            "branching: {} offers {} action(s)",
                            show_history(h),
                            actions.len()
                        ));
                    }
                    checker.check_cells(h, &actions, &mut perm, &mut out);
                }
            }
            let image: BTreeSet<NodeId> =
                all.iter().map(|h| checker.map(h, &mut perm)).collect();
            let onto = image.len() == g.num_nodes();
            if !onto {
                out.note(format!(
                    "surjectivity: image covers {} of {} histories of the finite game",
                    image.len(),
                    g.num_nodes()
                ));
            }
            surjective = Some(onto);
        }
        VerifyMode::Sampled { trials } => {
            let mut audit_perm = PermTable::new(derive(seed, tags::PERM));
            for t in 0..trials {
                let tseed = crate::machine::stream_trial_seed(derive(seed, tags::SAMPLER), t);
                let (terminal, mut perm) = match sample_history(family, n, honest, t, tseed) {
                    Ok(pair) => pair,
                    Err(msg) => {
                        out.note(msg);
                        continue;
                    }
                };
                let mut coin = RandomTape::new(derive(tseed, tags::DECIDER));
                let cut = sample_below(&mut coin, terminal.len() as u64 + 1) as usize;
                let prefix = &terminal[..cut];
                checked += 1;
                check_basic(rep, n, prefix, &mut perm, &mut out);
                let followed: &[BitString] = if cut < terminal.len() {
                    std::slice::from_ref(&terminal[cut])
                } else {
                    &[]
                };
                checker.check_cells(prefix, followed, &mut audit_perm, &mut out);
            }
        }
    }

    StructureReport {
        n,
        histories_checked: checked,
        surjective,
        violations: out.listed,
        violations_total: out.total,
    }
}

/// One terminal history plus the permutation it was played against: honest
/// run on even trials, uniform legal walk on odd ones.
fn sample_history(
    family: &dyn GameFamily,
    n: u32,
    honest: &[&dyn Machine],
    t: u64,
    tseed: u64,
) -> Result<(Vec<BitString>, PermTable), String> {
    if t % 2 == 0 {
        let (transcript, perm) = run_game_full(family, n, honest, tseed);
        match transcript.outcome {
            Outcome::Terminal { history, .. } => Ok((history, perm)),
            Outcome::Forfeit { offender, reason, .. } => Err(format!(
                "honest run forfeited: player {} ({reason:?})",
                offender + 1
            )),
        }
    } else {
        let perm = PermTable::new(derive(tseed, tags::PERM));
        let mut tape = RandomTape::new(derive(tseed, tags::SAMPLER));
        let mut h = Vec::new();
        while !family.is_terminal(n, &h) {
            let a = family.sample_action(n, &h, &mut tape);
            h.push(a);
        }
        Ok((h, perm))
    }
}

#[derive(Debug, Clone)]
pub struct UtilityReport {
    pub n: u32,
    pub terminals_checked: u64,
    pub mismatches: Vec<String>,
    pub mismatches_total: u64,
}

impl UtilityReport {
    pub fn pass(&self) -> bool {
        self.mismatches_total == 0
    }
}

/// Check exact utility agreement: at every terminal history, the family's
/// utility vector equals the finite game's at the image, as rationals.
pub fn verify_utilities(
    rep: &dyn Represent,
    n: u32,
    mode: VerifyMode,
    honest: &[&dyn Machine],
    seed: u64,
) -> UtilityReport {
    let family = rep.family();
    let g = rep.game();
    let mut out = Noter::new();
    let mut checked = 0u64;

    let check_one = |h: &[BitString], perm: &mut PermTable, out: &mut Noter| {
        let got = family.utilities(n, h, perm);
        let m = rep.map_history(n, h, perm);
        if !g.is_terminal(m) {
            out.note(format!(
                "terminal {} maps to nonterminal {}",
                show_history(h),
                g.display_history(m)
            ));
            return;
        }
        let want = g.utilities(m);
        if got != *want {
            out.note(format!(
                "utilities at {} differ from its image {}",
                show_history(h),
                g.display_history(m)
            ));
        }
    };

    match mode {
        VerifyMode::Exhaustive { cap } => {
            let mut perm = PermTable::new(derive(seed, tags::PERM));
            for h in enumerate_histories(family, n, cap) {
                if family.is_terminal(n, &h) {
                    checked += 1;
                    check_one(&h, &mut perm, &mut out);
                }
            }
        }
        VerifyMode::Sampled { trials } => {
            for t in 0..trials {
                let tseed = crate::machine::stream_trial_seed(derive(seed, tags::SAMPLER), t);
                match sample_history(family, n, honest, t, tseed) {
                    Ok((terminal, mut perm)) => {
                        checked += 1;
                        check_one(&terminal, &mut perm, &mut out);
                    }
                    Err(msg) => out.note(msg),
                }
            }
        }
    }

    UtilityReport {
        n,
        terminals_checked: checked,
        mismatches: out.listed,
        mismatches_total: out.total,
    }
}

/// Outcome distribution of a machine profile pushed forward through `f_n`,
/// each trial mapped under its own permutation. Forfeited trials are
/// returned separately; they carry no finite-game outcome.
pub fn empirical_pushforward(
    rep: &dyn Represent,
    n: u32,
    machines: &[&dyn Machine],
    trials: u64,
    stream_seed: u64,
) -> (EmpiricalDistribution<NodeId>, u64) {
    let results: Vec<Option<NodeId>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = crate::machine::stream_trial_seed(stream_seed, t);
            let (transcript, mut perm) = run_game_full(rep.family(), n, machines, seed);
            match transcript.outcome {
                Outcome::Terminal { history, .. } => {
                    Some(rep.map_history(n, &history, &mut perm))
                }
                Outcome::Forfeit { .. } => None,
            }
        })
        .collect();
    let mut dist = EmpiricalDistribution::new();
    let mut forfeits = 0;
    for r in results {
        match r {
            Some(node) => dist.record(node),
            None => forfeits += 1,
        }
    }
    (dist, forfeits)
}

/// Push an already-collected empirical distribution forward through `f_n`
/// under one permutation. Only meaningful when the counts were gathered
/// against that same permutation (or when `f_n` ignores it); distributions
/// aggregated across per-trial permutations go through
/// [`empirical_pushforward`] instead.
pub fn pushforward(
    rep: &dyn Represent,
    n: u32,
    dist: &EmpiricalDistribution<Vec<BitString>>,
    perm: &mut PermTable,
) -> EmpiricalDistribution<NodeId> {
    dist.map_keys(|h| rep.map_history(n, h, perm))
}

/// L1 distance between empirical counts over `total` trials (forfeits
/// counted at a bin of their own) and an exact outcome distribution.
fn l1_vs_exact(
    emp: &EmpiricalDistribution<NodeId>,
    forfeits: u64,
    total: u64,
    exact: &OutcomeDistribution,
) -> f64 {
    assert!(total > 0);
    let mut keys: BTreeSet<NodeId> = emp.support().copied().collect();
    keys.extend(exact.support());
    let mut l1 = forfeits as f64 / total as f64;
    for k in keys {
        let e = emp.count(&k) as f64 / total as f64;
        let x = exact.prob(k).to_f64().expect("outcome probability fits in f64");
        l1 += (e - x).abs();
    }
    l1
}

#[derive(Debug, Clone)]
pub struct CorrespondenceRow {
    pub profile: String,
    pub n: u32,
    pub trials: u64,
    pub l1: f64,
    pub radius: f64,
    pub threshold: f64,
    pub forfeits: u64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct CorrespondenceReport {
    pub tol: f64,
    pub rows: Vec<CorrespondenceRow>,
}

impl CorrespondenceReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Check outcome correspondence: for each named behavioral profile and each
/// size, the pushforward of the empirical machine distribution must be
/// within `tol + 3 * radius` (L1) of the profile's exact outcome
/// distribution in the finite game.
pub fn verify_outcome_correspondence(
    rep: &dyn Represent,
    profiles: &[(String, Vec<BehavioralStrategy>)],
    n_list: &[u32],
    trials: u64,
    tol: f64,
    seed: u64,
) -> CorrespondenceReport {
    assert!(tol > 0.0 && tol <= 2.0, "L1 tolerance must lie in (0, 2]");
    assert!(trials >= 1);
    let g = rep.game();
    let radius = hoeffding_radius(trials);
    let threshold = tol + 3.0 * radius;
    let mut rows = Vec::new();
    for (pi, (name, profile)) in profiles.iter().enumerate() {
        let abstract_profile = StrategyProfile::new(
            profile.iter().map(|b| Strategy::Behavioral(b.clone())).collect(),
        );
        let exact = outcome_distribution(g, &abstract_profile)
            .unwrap_or_else(|e| panic!("profile {name} invalid: {e}"));
        let machines = lift_profile(rep, profile);
        let refs = machine_refs(&machines);
        for &n in n_list {
            let stream = derive(derive(seed, pi as u64 + 1), n as u64);
            let (emp, forfeits) = empirical_pushforward(rep, n, &refs, trials, stream);
            let l1 = l1_vs_exact(&emp, forfeits, trials, &exact);
            rows.push(CorrespondenceRow {
                profile: name.clone(),
                n,
                trials,
                l1,
                radius,
                threshold,
                forfeits,
                pass: l1 <= threshold,
            });
        }
    }
    CorrespondenceReport { tol, rows }
}

#[derive(Debug, Clone)]
pub struct InterpreterReport {
    pub n: u32,
    pub trials: u64,
    pub activations_checked: u64,
    pub forfeits: u64,
    pub mismatches: Vec<String>,
    pub mismatches_total: u64,
}

impl InterpreterReport {
    pub fn pass(&self) -> bool {
        self.mismatches_total == 0 && self.forfeits == 0
    }
}

/// Query allowance granted to one interpreter invocation. Interpreters are
/// honest poly-query machines; the allowance is deliberately generous so
/// that exhausting it signals a broken interpreter rather than a tight
/// budget.
pub const INTERPRETER_QUERY_ALLOWANCE: u64 = 1 << 20;

/// Check that each strategy's interpreter names exactly the abstract action
/// `f_n` assigns to the lifted machine's move, at every activation of every
/// on-path view. Any mismatch fails.
pub fn verify_interpreters(
    rep: &dyn Represent,
    profile: &[BehavioralStrategy],
    n: u32,
    trials: u64,
    seed: u64,
) -> InterpreterReport {
    let g = rep.game();
    let machines = lift_profile(rep, profile);
    let refs = machine_refs(&machines);

    struct TrialOutcome {
        activations: u64,
        forfeited: bool,
        mismatches: Vec<String>,
    }

    let results: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let tseed = crate::machine::stream_trial_seed(seed, t);
            let (transcript, mut perm) = run_game_full(rep.family(), n, &refs, tseed);
            let forfeited = matches!(transcript.outcome, Outcome::Forfeit { .. });
            let mut mismatches = Vec::new();
            let mut h: Vec<BitString> = Vec::new();
            for act in &transcript.activations {
                let mut next = h.clone();
                next.push(act.action.clone());
                let child = rep.map_history(n, &next, &mut perm);
                let expected = g
                    .last_action(child)
                    .expect("image of a nonempty history has a last action");
                let mut meter = QueryMeter::with_budget(INTERPRETER_QUERY_ALLOWANCE);
                let got = {
                    let mut oracle = Oracle::new(&mut perm, &mut meter);
                    rep.interpret(act.player, &profile[act.player], &act.view, &act.drawn, &mut oracle)
                };
                if got != expected {
                    mismatches.push(format!(
                        "trial {t}: at {} player {} acted {} (interpreted {})",
                        show_history(&h),
                        act.player + 1,
                        g.action_label(expected),
                        g.action_label(got)
                    ));
                }
                h = next;
            }
            TrialOutcome { activations: transcript.activations.len() as u64, forfeited, mismatches }
        })
        .collect();

    let mut out = Noter::new();
    let mut activations_checked = 0;
    let mut forfeits = 0;
    for r in results {
        activations_checked += r.activations;
        forfeits += r.forfeited as u64;
        for m in r.mismatches {
            out.note(m);
        }
    }
    InterpreterReport {
        n,
        trials,
        activations_checked,
        forfeits,
        mismatches: out.listed,
        mismatches_total: out.total,
    }
}

/// Empirical per-information-set action distribution, in the finite game,
/// of whichever machine moves for `player` in `machines`.
#[derive(Debug, Clone)]
pub struct InducedStrategy {
    pub player: usize,
    pub n: u32,
    pub trials: u64,
    pub forfeits: u64,
    /// Abstract action counts at each reached information set.
    pub counts: BTreeMap<InfoSetId, BTreeMap<ActionId, u64>>,
    /// The player's information sets never reached in any trial.
    pub unreached: Vec<InfoSetId>,
}

impl InducedStrategy {
    pub fn reach_count(&self, cell: InfoSetId) -> u64 {
        self.counts.get(&cell).map_or(0, |m| m.values().sum())
    }

    /// Conditional frequency of `action` among visits to `cell`.
    pub fn frequency(&self, cell: InfoSetId, action: ActionId) -> f64 {
        let total = self.reach_count(cell);
        assert!(total > 0, "cell was never reached");
        self.counts[&cell].get(&action).copied().unwrap_or(0) as f64 / total as f64
    }
}

/// Estimate the abstract strategy a machine induces for `player`: run the
/// profile and record, at every image node where `player` moves, which
/// abstract action the machine's move maps to.
pub fn induced_abstract_strategy(
    rep: &dyn Represent,
    n: u32,
    machines: &[&dyn Machine],
    player: usize,
    trials: u64,
    seed: u64,
) -> InducedStrategy {
    let g = rep.game();
    let results: Vec<Result<Vec<(InfoSetId, ActionId)>, ()>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let tseed = crate::machine::stream_trial_seed(seed, t);
            let (transcript, mut perm) = run_game_full(rep.family(), n, machines, tseed);
            let Outcome::Terminal { history, .. } = &transcript.outcome else {
                return Err(());
            };
            let mut moves = Vec::new();
            let mut node = rep.map_history(n, &[], &mut perm);
            for k in 0..history.len() {
                let child = rep.map_history(n, &history[..k + 1], &mut perm);
                if g.player_at(node) == Some(player) {
                    let cell = g.infoset_at(node).expect("decision node has a cell");
                    let action =
                        g.last_action(child).expect("image of a nonempty history has a last action");
                    moves.push((cell, action));
                }
                node = child;
            }
            Ok(moves)
        })
        .collect();

    let mut counts: BTreeMap<InfoSetId, BTreeMap<ActionId, u64>> = BTreeMap::new();
    let mut forfeits = 0;
    for r in results {
        match r {
            Ok(moves) => {
                for (cell, action) in moves {
                    *counts.entry(cell).or_default().entry(action).or_insert(0) += 1;
                }
            }
            Err(()) => forfeits += 1,
        }
    }
    let unreached = g.infosets_of(player).filter(|i| !counts.contains_key(i)).collect();
    InducedStrategy { player, n, trials, forfeits, counts, unreached }
}

//! Computational equilibrium checking.
//!
//! A machine profile is checked against a finite battery of named deviation
//! machines: no battery member may gain noticeably, and measured gains must
//! shrink as the size parameter grows. The sequential variant perturbs the
//! profile with vanishing trembles and demands the same at every cell of a
//! declared information partition, conditioned on the cell being reached.
//! Both checks estimate gains from matched-seed paired runs: the honest and
//! deviating profiles replay identical tapes and permutations, which leaves
//! every expectation unchanged while cancelling most of the variance.

use num::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bits::{BitSource, BitString};
use crate::crypto::{CryptoError, Oracle};
use crate::game::{
    check_epsilon_ne, BehavioralStrategy, GameError, NeReport, NodeId, Strategy, StrategyProfile,
};
use crate::indist::{transcript_reaches, Partition, ViewTarget, REACH_FLOOR};
use crate::machine::{
    run_game, run_game_full, stream_trial_seed, GameFamily, Machine, MachineKind, View,
};
use crate::represent::{
    lift_profile, machine_refs, verify_outcome_correspondence, CorrespondenceReport, Represent,
};
use crate::seeding::derive;
use crate::stats::{hoeffding_radius_scaled, nonincreasing_within};
use crate::Rational;

#[derive(Debug, thiserror::Error)]
pub enum EquilibriaError {
    #[error("profile is not an exact equilibrium of the finite game (max gain {0})")]
    NotEquilibrium(Rational),
    #[error("cell belongs to player {actual}, not {claimed}")]
    WrongOwner { claimed: usize, actual: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// One named deviation machine for one player.
pub struct Deviation {
    pub name: String,
    pub machine: Box<dyn Machine>,
}

/// Per-player lists of deviations to test a profile against. A finite
/// stand-in for quantifying over all bounded machines, so reports must name
/// the battery they were run with.
pub struct DeviationBattery {
    pub version: String,
    per_player: Vec<Vec<Deviation>>,
}

impl DeviationBattery {
    pub fn new(num_players: usize, version: &str) -> Self {
        DeviationBattery {
            version: version.to_string(),
            per_player: (0..num_players).map(|_| Vec::new()).collect(),
        }
    }

    pub fn push(&mut self, player: usize, name: &str, machine: Box<dyn Machine>) {
        self.per_player[player].push(Deviation { name: name.to_string(), machine });
    }

    pub fn num_players(&self) -> usize {
        self.per_player.len()
    }

    pub fn of(&self, player: usize) -> &[Deviation] {
        &self.per_player[player]
    }

    pub fn len(&self) -> usize {
        self.per_player.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One point of a gain ladder: the estimated benefit of a deviation at one
/// size, in raw utility units.
#[derive(Debug, Clone)]
pub struct GainRow {
    pub player: usize,
    pub deviation: String,
    pub n: u32,
    pub trials: u64,
    pub gain: f64,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct DeviationVerdict {
    pub player: usize,
    pub deviation: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug)]
pub struct NeCheckReport {
    pub battery_version: String,
    pub n_list: Vec<u32>,
    pub trials: u64,
    pub decay_tol: f64,
    pub rows: Vec<GainRow>,
    pub verdicts: Vec<DeviationVerdict>,
}

impl NeCheckReport {
    /// True iff every tested deviation's ladder ends below threshold and
    /// never grows. An empty battery passes vacuously.
    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

fn utility_span(family: &dyn GameFamily, n: u32) -> f64 {
    let (lo, hi) = family.utility_bounds(n);
    (hi - lo).to_f64().expect("utility span fits in f64")
}

/// Mean of `u_player(deviant) - u_player(honest)` over `trials` matched-seed
/// pairs, plus the confidence radius for a difference of values spanning
/// twice the family's utility range. The sum is exact rational arithmetic,
/// so the result is independent of scheduling.
fn paired_gain(
    family: &dyn GameFamily,
    n: u32,
    honest: &[&dyn Machine],
    deviant: &[&dyn Machine],
    player: usize,
    trials: u64,
    seed: u64,
) -> (f64, f64) {
    assert!(trials > 0);
    let total: Rational = (0..trials)
        .into_par_iter()
        .map(|t| {
            let tseed = stream_trial_seed(seed, t);
            let base = run_game(family, n, honest, tseed);
            let dev = run_game(family, n, deviant, tseed);
            dev.outcome.utilities()[player].clone() - base.outcome.utilities()[player].clone()
        })
        .reduce(Rational::zero, |a, b| a + b);
    let gain = (total / Rational::from_integer(trials.into()))
        .to_f64()
        .expect("gain fits in f64");
    (gain, hoeffding_radius_scaled(trials, 2.0 * utility_span(family, n)))
}

fn check_sizes(n_list: &[u32]) -> Vec<u32> {
    assert!(n_list.len() >= 2, "gain ladders need at least two sizes");
    assert!(n_list.windows(2).all(|w| w[0] < w[1]), "n_list must be ascending");
    n_list.to_vec()
}

fn ladder_verdict(ladder: &[(u32, f64, f64)], tol: f64) -> (bool, String) {
    let gains: Vec<f64> = ladder.iter().map(|&(_, g, _)| g).collect();
    let slack = 3.0 * ladder.iter().map(|&(_, _, r)| r).fold(0.0, f64::max);
    let &(last_n, last_gain, last_radius) = ladder.last().expect("nonempty ladder");
    let threshold = tol + 3.0 * last_radius;
    let decays = nonincreasing_within(&gains, slack);
    let pass = last_gain <= threshold && decays;
    let detail = if pass {
        format!("gain {last_gain:.4} at n={last_n} (threshold {threshold:.4})")
    } else if last_gain > threshold {
        format!("gain {last_gain:.4} at n={last_n} exceeds threshold {threshold:.4}")
    } else {
        format!("gain ladder {gains:?} is not nonincreasing within {slack:.4}")
    };
    (pass, detail)
}

/// Computational Nash check: estimate each battery deviation's gain ladder
/// against the profile. A deviation passes iff its gain at the largest size
/// is at most `decay_tol + 3 * radius` and the ladder is nonincreasing
/// within the same slack.
pub fn check_computational_ne(
    family: &dyn GameFamily,
    profile: &[&dyn Machine],
    battery: &DeviationBattery,
    n_list: &[u32],
    trials: u64,
    decay_tol: f64,
    seed: u64,
) -> NeCheckReport {
    let sizes = check_sizes(n_list);
    assert_eq!(battery.num_players(), family.num_players());
    assert_eq!(profile.len(), family.num_players());

    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for player in 0..family.num_players() {
        let player_seed = derive(seed, 0x4E00 + player as u64);
        for (di, dev) in battery.of(player).iter().enumerate() {
            let dev_seed = derive(player_seed, di as u64);
            let mut deviant: Vec<&dyn Machine> = profile.to_vec();
            deviant[player] = dev.machine.as_ref();
            let mut ladder = Vec::new();
            for &n in &sizes {
                let (gain, radius) =
                    paired_gain(family, n, profile, &deviant, player, trials, derive(dev_seed, n as u64));
                rows.push(GainRow { player, deviation: dev.name.clone(), n, trials, gain, radius });
                ladder.push((n, gain, radius));
            }
            let (pass, detail) = ladder_verdict(&ladder, decay_tol);
            verdicts.push(DeviationVerdict { player, deviation: dev.name.clone(), pass, detail });
        }
    }

    NeCheckReport {
        battery_version: battery.version.clone(),
        n_list: sizes,
        trials,
        decay_tol,
        rows,
        verdicts,
    }
}

/// Everything `lift_ne` measured: the exact finite-game check, outcome
/// correspondence of the lifted machines, and the computational NE check.
#[derive(Debug)]
pub struct LiftNeReport {
    pub exact: NeReport,
    pub correspondence: CorrespondenceReport,
    pub ne: NeCheckReport,
}

impl LiftNeReport {
    pub fn pass(&self) -> bool {
        self.correspondence.pass() && self.ne.pass()
    }
}

/// Lift an exact equilibrium and verify the lift: rejects profiles that are
/// not exact equilibria before any simulation, then chains the outcome
/// correspondence check and the computational NE check over the battery.
pub fn lift_ne(
    rep: &dyn Represent,
    sigma: &[BehavioralStrategy],
    battery: &DeviationBattery,
    n_list: &[u32],
    trials: u64,
    corr_tol: f64,
    decay_tol: f64,
    seed: u64,
) -> Result<(Vec<Box<dyn Machine>>, LiftNeReport), EquilibriaError> {
    let g = rep.game();
    let profile =
        StrategyProfile::new(sigma.iter().map(|s| Strategy::Behavioral(s.clone())).collect());
    let exact = check_epsilon_ne(g, &profile, &Rational::zero())?;
    if !exact.is_ne() {
        return Err(EquilibriaError::NotEquilibrium(exact.max_gain()));
    }

    let machines = lift_profile(rep, sigma);
    let refs = machine_refs(&machines);
    let profiles = vec![("lifted".to_string(), sigma.to_vec())];
    let correspondence =
        verify_outcome_correspondence(rep, &profiles, n_list, trials, corr_tol, derive(seed, 0xC0));
    let ne = check_computational_ne(
        rep.family(),
        &refs,
        battery,
        n_list,
        trials,
        decay_tol,
        derive(seed, 0xC1),
    );
    Ok((machines, LiftNeReport { exact, correspondence, ne }))
}

/// Plays like `base` until the run's image enters `cell`, then delegates to
/// `deviation` from that activation on, state included: the deviation sees
/// the full consumed record, exactly as if it had taken over the base
/// machine's tape. Cell entry is judged by the representation from the view
/// alone, so a cell the owner's view cannot determine never triggers.
pub struct SwitchMachine<'a> {
    rep: &'a dyn Represent,
    cell: Vec<NodeId>,
    base: &'a dyn Machine,
    deviation: &'a dyn Machine,
}

/// Build a switch deviation. Every member of `cell` must be a decision
/// history of `owner` in the finite game.
pub fn make_switch_machine<'a>(
    rep: &'a dyn Represent,
    owner: usize,
    base: &'a dyn Machine,
    cell: Vec<NodeId>,
    deviation: &'a dyn Machine,
) -> Result<SwitchMachine<'a>, EquilibriaError> {
    for &m in &cell {
        match rep.game().player_at(m) {
            Some(p) if p == owner => {}
            Some(p) => return Err(EquilibriaError::WrongOwner { claimed: owner, actual: p }),
            None => {
                return Err(EquilibriaError::Game(GameError::Unsupported(format!(
                    "cell member {} is terminal",
                    rep.game().display_history(m)
                ))))
            }
        }
    }
    Ok(SwitchMachine { rep, cell, base, deviation })
}

impl Machine for SwitchMachine<'_> {
    fn kind(&self) -> MachineKind {
        if self.base.kind() == MachineKind::Stateful
            || self.deviation.kind() == MachineKind::Stateful
        {
            MachineKind::Stateful
        } else {
            MachineKind::Stateless
        }
    }

    fn query_budget(&self, n: u32) -> u64 {
        // The flat term covers the detection queries (a few receiver checks
        // per activation).
        self.base.query_budget(n) + self.deviation.query_budget(n) + 64
    }

    fn step_budget(&self, n: u32) -> u64 {
        self.base.step_budget(n) + self.deviation.step_budget(n) + 64
    }

    fn act(
        &self,
        view: &View,
        tape: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError> {
        if self.rep.view_entered_cell(view, &self.cell, oracle)?.is_some() {
            self.deviation.act(view, tape, oracle)
        } else {
            self.base.act(view, tape, oracle)
        }
    }
}

/// Perturbs `base`: each activation first draws a block of tremble-test
/// bits and, if they are all zero (probability `2^-(n*k)` by default),
/// plays a uniformly random legal action instead of delegating. The test
/// block is drawn unconditionally, so the wrapper's consumption layout is
/// fixed and it can strip its own draws from the consumed record before
/// handing the record to a stateful base.
pub struct TrembleMachine<'a> {
    family: &'a dyn GameFamily,
    base: &'a dyn Machine,
    k: u32,
    bits_override: Option<usize>,
}

pub fn make_tremble_machine<'a>(
    family: &'a dyn GameFamily,
    base: &'a dyn Machine,
    k: u32,
) -> TrembleMachine<'a> {
    assert!(k >= 1, "tremble index starts at 1");
    TrembleMachine { family, base, k, bits_override: None }
}

impl<'a> TrembleMachine<'a> {
    /// Test hook: tremble iff `bits` tape bits are all zero, overriding the
    /// default `n * k`. Zero bits forces a tremble at every activation.
    pub fn with_tremble_bits(mut self, bits: usize) -> Self {
        self.bits_override = Some(bits);
        self
    }

    fn test_bits(&self, n: u32) -> usize {
        self.bits_override.unwrap_or(n as usize * self.k as usize)
    }

    /// Rebuild the base machine's consumed record from the wrapper's: drop
    /// trembled activations entirely (the base never acted) and strip the
    /// test block from the rest.
    fn strip_consumed(&self, n: u32, segments: &[BitString]) -> Vec<BitString> {
        let bits = self.test_bits(n);
        let mut kept = Vec::new();
        for seg in segments {
            assert!(seg.len() >= bits, "activation drew less than the test block");
            let test = seg.slice(0, bits);
            if !test.all_zero() {
                kept.push(seg.slice(bits, seg.len()));
            }
        }
        kept
    }
}

impl Machine for TrembleMachine<'_> {
    fn kind(&self) -> MachineKind {
        self.base.kind()
    }

    fn query_budget(&self, n: u32) -> u64 {
        self.base.query_budget(n)
    }

    fn step_budget(&self, n: u32) -> u64 {
        self.base.step_budget(n)
    }

    fn act(
        &self,
        view: &View,
        tape: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError> {
        let test = tape.take(self.test_bits(view.n));
        if test.all_zero() {
            return Ok(self.family.sample_action(view.n, &view.history, tape));
        }
        match &view.consumed {
            None => self.base.act(view, tape, oracle),
            Some(segments) => {
                let translated = View {
                    n: view.n,
                    player: view.player,
                    history: view.history.clone(),
                    consumed: Some(self.strip_consumed(view.n, segments)),
                };
                self.base.act(&translated, tape, oracle)
            }
        }
    }
}

/// One conditional gain estimate inside the sequential check.
#[derive(Debug, Clone)]
pub struct SeqGainRow {
    pub k: u32,
    pub player: usize,
    pub cell: String,
    pub deviation: String,
    pub n: u32,
    /// Matched pairs whose honest run reached the cell.
    pub accepted: u64,
    pub gain: f64,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct SeqVerdict {
    pub k: u32,
    pub player: usize,
    pub cell: String,
    pub deviation: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug)]
pub struct SeqEqReport {
    pub battery_version: String,
    pub n_list: Vec<u32>,
    pub trials: u64,
    pub decay_tol: f64,
    pub tremble_ks: Vec<u32>,
    pub delta_list: Vec<f64>,
    pub rows: Vec<SeqGainRow>,
    pub verdicts: Vec<SeqVerdict>,
    /// `(k, cell, n)` combinations whose reach fell below the floor.
    pub skipped: Vec<String>,
}

impl SeqEqReport {
    /// True iff every checked (k, cell, deviation) ladder passed. Cells
    /// skipped for negligible reach are exempt by definition and listed.
    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Honest-side run data for one (k, cell, n): per trial, whether the image
/// path reached the cell, and the cell owner's utility.
fn honest_conditionals(
    rep: &dyn Represent,
    n: u32,
    trembled: &[&dyn Machine],
    target: &ViewTarget,
    player: usize,
    trials: u64,
    seed: u64,
) -> Vec<(bool, Rational)> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let tseed = stream_trial_seed(seed, t);
            let (transcript, mut perm) = run_game_full(rep.family(), n, trembled, tseed);
            let reached = transcript_reaches(rep, n, &transcript, &mut perm, target);
            (reached, transcript.outcome.utilities()[player].clone())
        })
        .collect()
}

/// Computational sequential equilibrium check. For each tremble index `k`
/// (with allowance `delta_list[i]`), each partition cell, and each battery
/// deviation of the cell's owner: estimate the owner's conditional gain from
/// switching to the deviation at the cell, conditioned on the trembled
/// profile reaching the cell, via matched-seed pairs (the switch machine
/// agrees with its base until the cell, so the conditioning event is
/// identical on both sides of every pair). A ladder passes iff its gain at
/// the largest size is at most `delta + decay_tol + 3 * radius` and it is
/// nonincreasing within the slack. Cells reached fewer than [`REACH_FLOOR`]
/// times are skipped and listed, not failed.
///
/// The partition should have passed `check_consistent_partition` for this
/// profile first; this function takes that as given. One partition serves
/// every (k, n) here, a deliberate narrowing of the definition, which allows
/// the partition to vary with both.
pub fn check_computational_seqeq(
    rep: &dyn Represent,
    profile: &[&dyn Machine],
    partition: &Partition,
    battery: &DeviationBattery,
    tremble_ks: &[u32],
    delta_list: &[f64],
    n_list: &[u32],
    trials: u64,
    decay_tol: f64,
    seed: u64,
) -> SeqEqReport {
    let sizes = check_sizes(n_list);
    assert_eq!(tremble_ks.len(), delta_list.len(), "one delta per tremble index");
    assert!(
        delta_list.windows(2).all(|w| w[0] >= w[1]),
        "tremble allowances must be nonincreasing"
    );
    let family = rep.family();
    assert_eq!(profile.len(), family.num_players());

    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    let mut skipped = Vec::new();

    for (ki, (&k, &delta)) in tremble_ks.iter().zip(delta_list).enumerate() {
        let k_seed = derive(seed, 0x5E00 + ki as u64);
        let trembled_owned: Vec<TrembleMachine> =
            profile.iter().map(|m| make_tremble_machine(family, *m, k)).collect();
        let trembled: Vec<&dyn Machine> =
            trembled_owned.iter().map(|m| m as &dyn Machine).collect();

        for (ci, cell) in partition.cells.iter().enumerate() {
            if battery.of(cell.player).is_empty() {
                continue;
            }
            let cell_seed = derive(k_seed, ci as u64);
            let target = ViewTarget::set(cell.members.iter().copied());

            // Honest-side pass per n, shared by all of this cell's deviations.
            let mut honest_by_n = Vec::new();
            let mut floor_failure = None;
            for &n in &sizes {
                let hseed = derive(cell_seed, n as u64);
                let honest = honest_conditionals(
                    rep,
                    n,
                    &trembled,
                    &target,
                    cell.player,
                    trials,
                    derive(hseed, 0x10),
                );
                let accepted = honest.iter().filter(|(r, _)| *r).count() as u64;
                if accepted < REACH_FLOOR {
                    floor_failure = Some(format!(
                        "k={k} player {} cell {} at n={n}: reached {accepted} of {trials} \
                         (floor {REACH_FLOOR})",
                        cell.player, cell.label
                    ));
                    break;
                }
                honest_by_n.push((n, hseed, honest, accepted));
            }
            if let Some(reason) = floor_failure {
                skipped.push(reason);
                continue;
            }

            for dev in battery.of(cell.player) {
                let switch = match make_switch_machine(
                    rep,
                    cell.player,
                    trembled[cell.player],
                    cell.members.clone(),
                    dev.machine.as_ref(),
                ) {
                    Ok(m) => m,
                    Err(e) => {
                        skipped.push(format!(
                            "k={k} cell {} deviation {}: {e}",
                            cell.label, dev.name
                        ));
                        continue;
                    }
                };
                let mut deviant: Vec<&dyn Machine> = trembled.clone();
                deviant[cell.player] = &switch;

                let mut ladder = Vec::new();
                for (n, hseed, honest, accepted) in &honest_by_n {
                    let diff_total: Rational = (0..trials)
                        .into_par_iter()
                        .map(|t| {
                            let (reached, base_u) = &honest[t as usize];
                            if !reached {
                                return Rational::zero();
                            }
                            let tseed = stream_trial_seed(derive(*hseed, 0x10), t);
                            let run = run_game(rep.family(), *n, &deviant, tseed);
                            run.outcome.utilities()[cell.player].clone() - base_u.clone()
                        })
                        .reduce(Rational::zero, |a, b| a + b);
                    let gain = (diff_total / Rational::from_integer((*accepted).into()))
                        .to_f64()
                        .expect("gain fits in f64");
                    let radius =
                        hoeffding_radius_scaled(*accepted, 2.0 * utility_span(family, *n));
                    rows.push(SeqGainRow {
                        k,
                        player: cell.player,
                        cell: cell.label.clone(),
                        deviation: dev.name.clone(),
                        n: *n,
                        accepted: *accepted,
                        gain,
                        radius,
                    });
                    ladder.push((*n, gain, radius));
                }
                let (pass, detail) = ladder_verdict(&ladder, delta + decay_tol);
                verdicts.push(SeqVerdict {
                    k,
                    player: cell.player,
                    cell: cell.label.clone(),
                    deviation: dev.name.clone(),
                    pass,
                    detail,
                });
            }
        }
    }

    SeqEqReport {
        battery_version: battery.version.clone(),
        n_list: sizes,
        trials,
        decay_tol,
        tremble_ks: tremble_ks.to_vec(),
        delta_list: delta_list.to_vec(),
        rows,
        verdicts,
        skipped,
    }
}

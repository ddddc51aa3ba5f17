//! The stateful/stateless separation. The finite game is the win/loss
//! commitment game; the computational family lets the committer pick its
//! own key length per run by prefixing the first action with an encoded
//! length. Honest stateful play uses full-length keys and is safe. Every
//! stateless committer loses to one of two attacks: a guesser that
//! simulates the committer's reveal step to extract the key before
//! guessing, or (on the other side) a committer that combines a short key
//! with brute-force self-recovery at reveal time, which a budgeted guesser
//! cannot break but an unbudgeted check can confirm always opens.

use num::{BigInt, One};

use crate::bits::{BitSource, BitString};
use crate::crypto::{commit, committed_bit, reveal, CryptoError, Oracle, PermTable, Reveal};
use crate::game::{uniform_behavioral, ActionId, BehavioralStrategy, GameTree, NodeId};
use crate::machine::{
    empirical_utilities, run_game_full, GameFamily, Machine, MachineKind, View,
};
use crate::represent::{
    lift_profile, machine_refs, verify_interpreters, verify_structure, verify_utilities,
    Represent, VerifyMode,
};
use crate::seeding::derive;
use crate::Rational;

use super::commitment::{
    commitment_tree, committer_sigma, extract_key_attack, guesser_sigma, CommitRep, Scoring,
};
use super::ResultRow;

fn ceil_log2(m: u64) -> usize {
    debug_assert!(m >= 1);
    m.next_power_of_two().trailing_zeros() as usize
}

/// Scale parameters for the separation: `a` is the defender-class budget
/// exponent (weak adversaries get `n^a` queries). The short-key strategy
/// uses keys of length `kappa(n)`, long enough that weak adversaries cannot
/// enumerate them but short enough for its own brute-force recovery.
#[derive(Debug, Clone, Copy)]
pub struct SeparationConfig {
    pub a: u32,
}

impl SeparationConfig {
    pub fn new(a: u32) -> SeparationConfig {
        assert!(a >= 1, "the budget exponent must be at least 1");
        SeparationConfig { a }
    }

    /// Key length for the short-key strategy: the least `k` with
    /// `2^k >= n^(a+1)`.
    pub fn kappa(&self, n: u32) -> u32 {
        let target = u128::from(n).pow(self.a + 1);
        let mut k = 0u32;
        while (1u128 << k) < target {
            k += 1;
        }
        k
    }

    /// Queries the short-key strategy may need: one commit plus a full key
    /// enumeration.
    pub fn attacker_budget(&self, n: u32) -> u64 {
        (1u64 << self.kappa(n)) + u64::from(n)
    }

    /// The scale regime the separation lives in: short keys must be
    /// genuinely shorter than honest full-length keys.
    pub fn valid_at(&self, n: u32) -> bool {
        self.kappa(n) < n - 1
    }
}

/// The win/loss commitment game underlying the separation.
pub fn separation_game() -> GameTree {
    commitment_tree(Scoring::WinLoss)
}

/// The separation family: the first `ceil(log2 n)` bits of the committer's
/// first action encode a key length `kappa` in `1..=n-1`; the rest of the
/// action is a width-`kappa+1` commitment string. The guess is one bit and
/// the reveal exactly `kappa` bits. Utilities are win/loss: the committer
/// wins iff it opens a bit the guesser missed.
pub struct SeparationFamily;

impl SeparationFamily {
    fn check_n(n: u32) {
        assert!((2..=64).contains(&n), "separation sizes are 2..=64, got {n}");
    }

    fn prefix_len(n: u32) -> usize {
        ceil_log2(u64::from(n))
    }

    fn decode_kappa(n: u32, v: u64) -> u32 {
        (v % u64::from(n - 1)) as u32 + 1
    }

    /// The committer's declared key length, parsed from its first action.
    pub fn kappa_of(n: u32, first: &BitString) -> u32 {
        let l = Self::prefix_len(n);
        Self::decode_kappa(n, first.slice(0, l).to_u64())
    }

    /// The commitment string inside a first action.
    pub fn commit_part(n: u32, first: &BitString) -> BitString {
        first.slice(Self::prefix_len(n), first.len())
    }

    /// The canonical prefix declaring key length `kappa`.
    pub fn encode_kappa(n: u32, kappa: u32) -> BitString {
        assert!((1..n).contains(&kappa));
        BitString::from_u64(u64::from(kappa) - 1, Self::prefix_len(n))
    }
}

impl GameFamily for SeparationFamily {
    fn name(&self) -> &str {
        "separation"
    }

    fn num_players(&self) -> usize {
        2
    }

    fn action_length_bound(&self, n: u32) -> usize {
        Self::prefix_len(n) + n as usize
    }

    fn is_history(&self, n: u32, h: &[BitString]) -> bool {
        Self::check_n(n);
        if h.len() > 3 {
            return false;
        }
        if let Some(first) = h.first() {
            let l = Self::prefix_len(n);
            if first.len() < l + 2 {
                return false;
            }
            let kappa = Self::kappa_of(n, first) as usize;
            if first.len() != l + kappa + 1 {
                return false;
            }
            if h.len() >= 2 && h[1].len() != 1 {
                return false;
            }
            if h.len() == 3 && h[2].len() != kappa {
                return false;
            }
        }
        true
    }

    fn is_terminal(&self, _n: u32, h: &[BitString]) -> bool {
        h.len() == 3
    }

    fn player(&self, _n: u32, h: &[BitString]) -> usize {
        usize::from(h.len() == 1)
    }

    fn utilities(&self, n: u32, h: &[BitString], perm: &mut PermTable) -> Vec<Rational> {
        Self::check_n(n);
        let c = Self::commit_part(n, &h[0]);
        let (key, bit) = committed_bit(perm, &c);
        let committer_wins = h[2] == key && bit != h[1].bit(0);
        let (u0, u1) = if committer_wins { (1, 0) } else { (0, 1) };
        vec![Rational::from_integer(u0.into()), Rational::from_integer(u1.into())]
    }

    fn utility_bounds(&self, _n: u32) -> (Rational, Rational) {
        (Rational::from_integer(0.into()), Rational::from_integer(1.into()))
    }

    fn enumerate_actions(&self, n: u32, h: &[BitString]) -> Vec<BitString> {
        match h.len() {
            0 => {
                assert!(n <= 8, "stage-0 enumeration is desk-scale only up to n=8");
                let l = Self::prefix_len(n);
                let mut out = Vec::new();
                for v in 0..1u64 << l {
                    let kappa = Self::decode_kappa(n, v) as usize;
                    let prefix = BitString::from_u64(v, l);
                    for s in 0..1u64 << (kappa + 1) {
                        out.push(prefix.concat(&BitString::from_u64(s, kappa + 1)));
                    }
                }
                out
            }
            1 => vec![BitString::from_u64(0, 1), BitString::from_u64(1, 1)],
            _ => {
                let kappa = Self::kappa_of(n, &h[0]);
                assert!(kappa <= 16, "key enumeration is desk-scale only up to 16 bits");
                (0..1u64 << kappa).map(|k| BitString::from_u64(k, kappa as usize)).collect()
            }
        }
    }

    fn sample_action(&self, n: u32, h: &[BitString], src: &mut dyn BitSource) -> BitString {
        match h.len() {
            0 => {
                let prefix = src.take(Self::prefix_len(n));
                let kappa = Self::decode_kappa(n, prefix.to_u64()) as usize;
                prefix.concat(&src.take(kappa + 1))
            }
            1 => src.take(1),
            _ => src.take(Self::kappa_of(n, &h[0]) as usize),
        }
    }
}

/// The separation game with its history map and honest (full-key-length)
/// lift. History mapping strips the length prefix and reuses the plain
/// commitment-game map; the lift plays width-`n` commitments behind the
/// canonical full-length prefix.
pub struct SeparationRep {
    inner: CommitRep,
    family: SeparationFamily,
}

pub fn build_separation_rep() -> SeparationRep {
    SeparationRep { inner: CommitRep::new(Scoring::WinLoss), family: SeparationFamily }
}

impl Represent for SeparationRep {
    fn game(&self) -> &GameTree {
        self.inner.game()
    }

    fn family(&self) -> &dyn GameFamily {
        &self.family
    }

    fn map_history(&self, n: u32, h: &[BitString], perm: &mut PermTable) -> NodeId {
        if h.is_empty() {
            return self.game().root();
        }
        let mut stripped = h.to_vec();
        stripped[0] = SeparationFamily::commit_part(n, &h[0]);
        self.inner.map_history(n, &stripped, perm)
    }

    fn lift(&self, player: usize, sigma: &BehavioralStrategy) -> Box<dyn Machine> {
        if player == 0 {
            Box::new(PrefixedCommitter { inner: self.inner.lift(0, sigma) })
        } else {
            self.inner.lift(1, sigma)
        }
    }

    fn interpret(
        &self,
        player: usize,
        sigma: &BehavioralStrategy,
        view: &View,
        fresh: &BitString,
        oracle: &mut Oracle,
    ) -> ActionId {
        self.inner.interpret(player, sigma, view, fresh, oracle)
    }
}

/// Honest lift of a committer strategy: full-length key (`kappa = n-1`)
/// behind the canonical prefix. Reveal-stage behavior replays consumed
/// randomness exactly as in the plain commitment game; the prefix carries
/// no entropy.
struct PrefixedCommitter {
    inner: Box<dyn Machine>,
}

impl Machine for PrefixedCommitter {
    fn kind(&self) -> MachineKind {
        MachineKind::Stateful
    }

    fn query_budget(&self, n: u32) -> u64 {
        self.inner.query_budget(n)
    }

    fn act(
        &self,
        view: &View,
        tape: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError> {
        let action = self.inner.act(view, tape, oracle)?;
        if view.history.is_empty() {
            let prefix = SeparationFamily::encode_kappa(view.n, view.n - 1);
            Ok(prefix.concat(&action))
        } else {
            Ok(action)
        }
    }
}

/// The short-key strategy: a stateless committer that commits to a uniform
/// bit under a `kappa(n)`-bit key and, at reveal time, recovers its own key
/// by trying every candidate against the receiver, exiting at the first
/// that opens. Perfect binding makes that key unique, so it always opens;
/// a guesser limited to `n^a` queries cannot enumerate the `n^(a+1)`-size
/// key space and learns nothing.
pub struct ShortKeyAttack {
    cfg: SeparationConfig,
}

pub fn short_key_attack(cfg: SeparationConfig) -> ShortKeyAttack {
    ShortKeyAttack { cfg }
}

impl Machine for ShortKeyAttack {
    fn kind(&self) -> MachineKind {
        MachineKind::Stateless
    }

    fn query_budget(&self, n: u32) -> u64 {
        self.cfg.attacker_budget(n)
    }

    fn act(
        &self,
        view: &View,
        tape: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError> {
        let n = view.n;
        if view.history.is_empty() {
            let kappa = self.cfg.kappa(n);
            assert!(
                self.cfg.valid_at(n),
                "short keys need kappa(n) < n-1; got kappa({n}) = {kappa}"
            );
            let bit = tape.take_bit();
            let c = commit(oracle, (kappa + 1) as u8, bit, tape)?;
            return Ok(SeparationFamily::encode_kappa(n, kappa).concat(&c.string));
        }
        let c = SeparationFamily::commit_part(n, &view.history[0]);
        let kappa = c.len() - 1;
        for k in 0..1u64 << kappa {
            let candidate = BitString::from_u64(k, kappa);
            if let Reveal::Bit(_) = reveal(oracle, &c, &candidate)? {
                return Ok(candidate);
            }
        }
        Ok(BitString::zeros(kappa))
    }
}

/// Stateless committer that commits honestly at full width but cannot
/// remember its key; at reveal it draws a fresh one, which opens only by
/// luck.
struct FreshKeyCommitter;

impl Machine for FreshKeyCommitter {
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
            let bit = tape.take_bit();
            let c = commit(oracle, n as u8, bit, tape)?;
            return Ok(SeparationFamily::encode_kappa(n, n - 1).concat(&c.string));
        }
        Ok(tape.take(n as usize - 1))
    }
}

/// Stateless committer that commits honestly and then plays a fixed key,
/// destroying its own commitment essentially always.
struct NeverRevealCommitter;

impl Machine for NeverRevealCommitter {
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
            let bit = tape.take_bit();
            let c = commit(oracle, n as u8, bit, tape)?;
            return Ok(SeparationFamily::encode_kappa(n, n - 1).concat(&c.string));
        }
        Ok(BitString::zeros(n as usize - 1))
    }
}

/// Stateless committer that always uses the all-zero key so it can reopen
/// from memory of nothing.
struct PrefixedZeroKey;

impl Machine for PrefixedZeroKey {
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
            let bit = tape.take_bit();
            let image = oracle.forward(n as u8, bit as u64)?;
            let c = BitString::from_u64(image, n as usize);
            return Ok(SeparationFamily::encode_kappa(n, n - 1).concat(&c));
        }
        Ok(BitString::zeros(n as usize - 1))
    }
}

/// Guesser that tries the all-zero key on the viewed commitment and plays
/// the recovered bit when it opens.
struct ZeroKeyProber;

impl Machine for ZeroKeyProber {
    fn kind(&self) -> MachineKind {
        MachineKind::Stateless
    }

    fn query_budget(&self, _n: u32) -> u64 {
        1
    }

    fn act(
        &self,
        view: &View,
        _tape: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError> {
        let c = SeparationFamily::commit_part(view.n, &view.history[0]);
        let guess = match reveal(oracle, &c, &BitString::zeros(c.len() - 1))? {
            Reveal::Bit(b) => b,
            Reveal::Fail => true,
        };
        Ok(BitString::from_u64(guess as u64, 1))
    }
}

/// One registered stateless profile: constructors for its two machines.
pub struct Candidate {
    pub name: &'static str,
    pub committer: fn(&SeparationConfig) -> Box<dyn Machine>,
    pub guesser: fn(&SeparationRep) -> Box<dyn Machine>,
}

fn uniform_guesser(rep: &SeparationRep) -> Box<dyn Machine> {
    rep.lift(1, &uniform_behavioral(rep.game(), 1))
}

/// The registered stateless candidate profiles the attacks must defeat.
pub fn stateless_candidates() -> Vec<Candidate> {
    vec![
        Candidate {
            name: "fresh-key",
            committer: |_| Box::new(FreshKeyCommitter),
            guesser: uniform_guesser,
        },
        Candidate {
            name: "never-reveal",
            committer: |_| Box::new(NeverRevealCommitter),
            guesser: uniform_guesser,
        },
        Candidate {
            name: "hope-key-zero",
            committer: |_| Box::new(PrefixedZeroKey),
            guesser: |_| Box::new(ZeroKeyProber),
        },
        Candidate {
            name: "short-key",
            committer: |cfg| Box::new(short_key_attack(*cfg)),
            guesser: uniform_guesser,
        },
    ]
}

/// Exact lower bound on the key-extraction success probability against a
/// committer that opens with probability at least `1/n`:
/// `1 - (1 - 1/n)^(n^2)`.
pub fn extract_key_success_floor(n: u32) -> Rational {
    let base = Rational::new(BigInt::from(n - 1), BigInt::from(n));
    Rational::one() - pow_rational(&base, n * n)
}

/// Exact slack floor from the combined-payoff contradiction: any stateless
/// equilibrium tolerance must satisfy `eps >= 1/4 - 3/(2n)`.
pub fn weak_epsilon_floor(n: u32) -> Rational {
    Rational::new(1.into(), 4.into()) - Rational::new(3.into(), BigInt::from(2 * n))
}

fn pow_rational(x: &Rational, e: u32) -> Rational {
    Rational::new(x.numer().pow(e), x.denom().pow(e))
}

const EXP: &str = "separation";

fn honest_profile(g: &GameTree) -> Vec<BehavioralStrategy> {
    let half = Rational::new(1.into(), 2.into());
    let one = Rational::from_integer(1.into());
    vec![
        committer_sigma(g, half.clone(), [[one.clone(), one.clone()], [one.clone(), one]]),
        guesser_sigma(g, half),
    ]
}

/// The separation pipeline: scale checks, representation spot checks, both
/// attacks against every registered stateless candidate, the stateful
/// honest control, the short-key open-failure count, and the exact
/// arithmetic identities behind the impossibility argument.
pub fn run_separation_experiment(
    cfg: &SeparationConfig,
    trials: u64,
    failure_trials: u64,
    seed: u64,
) -> Vec<ResultRow> {
    let rep = build_separation_rep();
    let g = rep.game();
    let mut rows = Vec::new();

    for n in [16u32, 32, 64] {
        rows.push(ResultRow::at_most(
            EXP,
            Some(n),
            "kappa-bound",
            &format!("kappa={}", cfg.kappa(n)),
            cfg.kappa(n) as f64,
            0.0,
            (n - 2) as f64,
        ));
    }
    let codec_ok = [2u32, 4, 8, 16, 32, 64].iter().all(|&n| {
        (1..n).all(|kappa| {
            let prefix = SeparationFamily::encode_kappa(n, kappa);
            SeparationFamily::kappa_of(n, &prefix.concat(&BitString::zeros(kappa as usize + 1)))
                == kappa
        })
    });
    rows.push(ResultRow::check(EXP, None, "prefix-codec", "round-trip", codec_ok));

    let explorer = vec![uniform_behavioral(g, 0), uniform_behavioral(g, 1)];
    let walkers = lift_profile(&rep, &explorer);
    let refs = machine_refs(&walkers);
    let sampled = VerifyMode::Sampled { trials: 3_000 };
    let structure = verify_structure(&rep, 16, sampled, &refs, derive(seed, 2));
    rows.push(ResultRow::check(EXP, Some(16), "structure", "sampled", structure.pass()));
    let sampled = VerifyMode::Sampled { trials: 3_000 };
    let utilities = verify_utilities(&rep, 16, sampled, &refs, derive(seed, 3));
    rows.push(ResultRow::check(EXP, Some(16), "utilities", "sampled", utilities.pass()));
    let interp = verify_interpreters(&rep, &honest_profile(g), 8, 2_000, derive(seed, 4));
    rows.push(ResultRow::check(EXP, Some(8), "interpreter-mismatches", "honest", interp.pass()));

    let extract = |m1: Box<dyn Machine>| {
        extract_key_attack(m1, |n, first| SeparationFamily::commit_part(n, first))
    };
    for (ci, cand) in stateless_candidates().iter().enumerate() {
        let cseed = derive(seed, 0x5A00 + ci as u64);
        let committer = (cand.committer)(cfg);
        let attack = extract((cand.committer)(cfg));
        let u16 = empirical_utilities(
            rep.family(),
            16,
            &[committer.as_ref(), &attack],
            trials,
            derive(cseed, 1),
        );
        let extract_floor = 1.0 - 2.0 / 16.0 - 0.05;
        rows.push(ResultRow::at_least(
            EXP,
            Some(16),
            "extract-key-payoff",
            cand.name,
            u16[1],
            payoff_radius(trials),
            extract_floor,
        ));
        let u32v = empirical_utilities(
            rep.family(),
            32,
            &[committer.as_ref(), &attack],
            trials,
            derive(cseed, 2),
        );
        let shortkey = short_key_attack(*cfg);
        let defender = (cand.guesser)(&rep);
        let s32 = empirical_utilities(
            rep.family(),
            32,
            &[&shortkey, defender.as_ref()],
            trials,
            derive(cseed, 3),
        );
        let short_floor = 0.5 - 1.0 / 32.0 - 0.05;
        rows.push(ResultRow::at_least(
            EXP,
            Some(32),
            "short-key-payoff",
            cand.name,
            s32[0],
            payoff_radius(trials),
            short_floor,
        ));
        rows.push(ResultRow::check(
            EXP,
            None,
            "some-attack-wins",
            cand.name,
            u16[1] >= extract_floor || s32[0] >= short_floor,
        ));
        rows.push(ResultRow::at_least(
            EXP,
            Some(32),
            "combined-payoff",
            cand.name,
            u32v[1] + s32[0],
            2.0 * payoff_radius(trials),
            1.5 - 3.0 / 32.0 - 0.1,
        ));
    }

    let control_trials = trials.max(10_000);
    let honest = lift_profile(&rep, &honest_profile(g));
    let baseline = empirical_utilities(
        rep.family(),
        32,
        &machine_refs(&honest),
        control_trials,
        derive(seed, 0x5B),
    );
    let attack = extract(rep.lift(0, &honest_profile(g)[0]));
    let u_extract = empirical_utilities(
        rep.family(),
        32,
        &[honest[0].as_ref(), &attack],
        control_trials,
        derive(seed, 0x5C),
    );
    rows.push(ResultRow::at_most(
        EXP,
        Some(32),
        "control-extract-gain",
        "stateful-honest",
        u_extract[1] - baseline[1],
        2.0 * payoff_radius(control_trials),
        0.05,
    ));
    let shortkey = short_key_attack(*cfg);
    let u_short = empirical_utilities(
        rep.family(),
        32,
        &[&shortkey, honest[1].as_ref()],
        control_trials,
        derive(seed, 0x5D),
    );
    rows.push(ResultRow::at_most(
        EXP,
        Some(32),
        "control-short-gain",
        "stateful-honest",
        u_short[0] - baseline[0],
        2.0 * payoff_radius(control_trials),
        0.05,
    ));

    let shortkey = short_key_attack(*cfg);
    let opener: Vec<&dyn Machine> = vec![&shortkey, honest[1].as_ref()];
    let mut failures = 0u64;
    for t in 0..failure_trials {
        let (transcript, mut perm) =
            run_game_full(rep.family(), 32, &opener, derive(derive(seed, 0x5E), t));
        let opened = transcript.outcome.terminal_history().is_some_and(|h| {
            let c = SeparationFamily::commit_part(32, &h[0]);
            let (key, _) = committed_bit(&mut perm, &c);
            h[2] == key
        });
        if !opened {
            failures += 1;
        }
    }
    rows.push(ResultRow::at_most(
        EXP,
        Some(32),
        "short-key-open-failures",
        &format!("{failure_trials}-trials"),
        failures as f64,
        0.0,
        0.0,
    ));

    let success_ok = (2..=64u32).all(|n| {
        extract_key_success_floor(n)
            > Rational::one() - Rational::new(2.into(), BigInt::from(n))
    });
    rows.push(ResultRow::check(EXP, None, "extract-success-floor", "n=2..64", success_ok));
    let boundary_ok = (2..=64u32).all(|n| {
        let lhs = Rational::new(3.into(), 2.into())
            - Rational::new(3.into(), BigInt::from(n))
            - Rational::from_integer(2.into()) * weak_epsilon_floor(n);
        lhs == Rational::one()
    });
    rows.push(ResultRow::check(EXP, None, "epsilon-floor-boundary", "n=2..64", boundary_ok));

    rows
}

fn payoff_radius(trials: u64) -> f64 {
    crate::stats::hoeffding_radius(trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::represent::sample_behavioral;
    use crate::tape::RandomTape;

    #[test]
    fn kappa_scales_as_the_budget_exponent_dictates() {
        let cfg = SeparationConfig::new(2);
        assert_eq!(cfg.kappa(16), 12);
        assert_eq!(cfg.kappa(32), 15);
        assert_eq!(cfg.kappa(64), 18);
        for n in [16, 32, 64] {
            assert!(cfg.valid_at(n), "kappa({n}) must stay below n-1");
        }
        assert!(!cfg.valid_at(8), "n=8 is below the separation's scale regime at a=2");
        assert_eq!(cfg.attacker_budget(32), (1 << 15) + 32);
    }

    #[test]
    fn prefix_codec_round_trips_and_gates_history_validity() {
        let fam = SeparationFamily;
        for n in [2u32, 4, 16, 33] {
            for kappa in 1..n {
                let prefix = SeparationFamily::encode_kappa(n, kappa);
                let action = prefix.concat(&BitString::zeros(kappa as usize + 1));
                assert_eq!(SeparationFamily::kappa_of(n, &action), kappa);
                assert!(fam.is_history(n, std::slice::from_ref(&action)));
                let toggled = prefix.concat(&BitString::zeros(kappa as usize + 2));
                assert!(!fam.is_history(n, &[toggled]), "wrong body length must be rejected");
            }
        }
    }

    #[test]
    fn the_representation_passes_exhaustive_checks_small() {
        let rep = build_separation_rep();
        let s = verify_structure(&rep, 4, VerifyMode::Exhaustive { cap: 100_000 }, &[], 1);
        assert!(s.pass(), "{:?}", s.violations);
        assert_eq!(s.surjective, Some(true));
        let u = verify_utilities(&rep, 4, VerifyMode::Exhaustive { cap: 100_000 }, &[], 2);
        assert!(u.pass(), "{:?}", u.mismatches);
        let i = verify_interpreters(&rep, &honest_profile(rep.game()), 4, 400, 3);
        assert!(i.pass(), "{:?}", i.mismatches);
    }

    #[test]
    fn honest_runs_open_and_split_the_stake() {
        let rep = build_separation_rep();
        let honest = lift_profile(&rep, &honest_profile(rep.game()));
        let u = empirical_utilities(rep.family(), 16, &machine_refs(&honest), 2_000, 7);
        assert!((u[0] - 0.5).abs() < 0.05, "committer payoff {} should be near 1/2", u[0]);
        assert_eq!(u[0] + u[1], 1.0, "win/loss payoffs partition the stake");
    }

    #[test]
    fn short_key_recovery_always_opens() {
        let cfg = SeparationConfig::new(2);
        let rep = build_separation_rep();
        let shortkey = short_key_attack(cfg);
        let guesser = uniform_guesser(&rep);
        let profile: Vec<&dyn Machine> = vec![&shortkey, guesser.as_ref()];
        for t in 0..200 {
            let (transcript, mut perm) = run_game_full(rep.family(), 16, &profile, 900 + t);
            let h = transcript.outcome.terminal_history().expect("no forfeits");
            let c = SeparationFamily::commit_part(16, &h[0]);
            let (key, _) = committed_bit(&mut perm, &c);
            assert_eq!(h[2], key, "the enumerated key must open at trial {t}");
        }
    }

    #[test]
    fn extract_key_breaks_every_stateless_candidate() {
        let cfg = SeparationConfig::new(2);
        let rep = build_separation_rep();
        for cand in stateless_candidates() {
            let committer = (cand.committer)(&cfg);
            let attack = extract_key_attack((cand.committer)(&cfg), |n, first| {
                SeparationFamily::commit_part(n, first)
            });
            let u = empirical_utilities(
                rep.family(),
                16,
                &[committer.as_ref(), &attack],
                400,
                11,
            );
            assert!(
                u[1] >= 1.0 - 2.0 / 16.0 - 0.05,
                "{}: attacker payoff {} below the floor",
                cand.name,
                u[1]
            );
        }
    }

    #[test]
    fn attacks_gain_nothing_against_the_stateful_honest_profile() {
        let rep = build_separation_rep();
        let honest = lift_profile(&rep, &honest_profile(rep.game()));
        let attack = extract_key_attack(rep.lift(0, &honest_profile(rep.game())[0]), |n, first| {
            SeparationFamily::commit_part(n, first)
        });
        let u = empirical_utilities(
            rep.family(),
            16,
            &[honest[0].as_ref(), &attack],
            2_000,
            13,
        );
        assert!(
            (u[1] - 0.5).abs() < 0.05,
            "extraction against a stateful committer should stay near chance, got {}",
            u[1]
        );
    }

    #[test]
    fn never_reveal_hands_the_stake_to_the_guesser() {
        let rep = build_separation_rep();
        let committer = NeverRevealCommitter;
        let guesser = uniform_guesser(&rep);
        let profile: Vec<&dyn Machine> = vec![&committer, guesser.as_ref()];
        let u = empirical_utilities(rep.family(), 16, &profile, 200, 17);
        assert_eq!(u, vec![0.0, 1.0], "a destroyed commitment never wins");
    }

    #[test]
    fn the_exact_identities_hold_across_the_ladder() {
        for n in 2..=64u32 {
            let floor = extract_key_success_floor(n);
            let target = Rational::one() - Rational::new(2.into(), BigInt::from(n));
            assert!(floor > target, "success floor must beat 1-2/n at n={n}");
            let lhs = Rational::new(3.into(), 2.into())
                - Rational::new(3.into(), BigInt::from(n))
                - Rational::from_integer(2.into()) * weak_epsilon_floor(n);
            assert_eq!(lhs, Rational::one(), "boundary algebra at n={n}");
        }
        let f2 = extract_key_success_floor(2);
        assert_eq!(f2, Rational::new(15.into(), 16.into()));
    }

    #[test]
    fn sampled_walks_respect_variable_key_lengths() {
        let fam = SeparationFamily;
        let mut tape = RandomTape::new(5);
        for _ in 0..50 {
            let first = fam.sample_action(16, &[], &mut tape);
            assert!(fam.is_history(16, std::slice::from_ref(&first)));
            let kappa = SeparationFamily::kappa_of(16, &first) as usize;
            assert_eq!(first.len(), SeparationFamily::prefix_len(16) + kappa + 1);
        }
    }

    #[test]
    fn interpreters_recover_the_abstract_moves_from_machine_views() {
        let rep = build_separation_rep();
        let sigma = honest_profile(rep.game());
        let machines = lift_profile(&rep, &sigma);
        let refs = machine_refs(&machines);
        let (t, mut perm) = run_game_full(rep.family(), 8, &refs, 23);
        let h = t.outcome.terminal_history().unwrap();
        let node = rep.map_history(8, h, &mut perm);
        let label = rep.game().action_label(rep.game().last_action(node).unwrap());
        assert!(label.starts_with("open"), "honest play opens, got {label}");
        let _ = sample_behavioral;
    }

    #[test]
    fn the_driver_rows_are_deterministic_and_identities_pass() {
        let cfg = SeparationConfig::new(2);
        let a = run_separation_experiment(&cfg, 60, 60, 41);
        let b = run_separation_experiment(&cfg, 60, 60, 41);
        assert_eq!(super::super::rows_to_csv(&a), super::super::rows_to_csv(&b));
        for metric in ["extract-success-floor", "epsilon-floor-boundary", "prefix-codec"] {
            assert!(
                a.iter().find(|r| r.metric == metric).unwrap().pass,
                "{metric} must pass"
            );
        }
    }
}

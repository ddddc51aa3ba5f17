//! The game runner: plays one profile of machines against each other in one
//! instance of a family, with explicit randomness and explicit budgets.
//!
//! Budget accounting: each machine pays one step per activation plus one
//! step per permutation query, against `step_budget(n)`; queries are
//! additionally metered against `query_budget(n)`. A machine that emits an
//! illegal action or runs out of budget forfeits: it receives the family's
//! minimum utility and everyone else receives zero, and the run ends. The
//! trial itself is never aborted, so forfeits show up in empirical
//! distributions rather than silently vanishing.

use num::Zero;

use crate::bits::{BitSource, BitString};
use crate::crypto::{CryptoError, Oracle, PermTable, QueryMeter};
use crate::seeding::{derive, tags};
use crate::tape::RandomTape;
use crate::Rational;

use super::family::{GameFamily, View};

/// Whether a machine may carry state across its own activations. Stateful
/// machines are shown the randomness they already consumed and can replay it
/// to reconstruct earlier decisions; stateless machines see only the current
/// visible history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineKind {
    Stateful,
    Stateless,
}

pub trait Machine: Sync {
    fn kind(&self) -> MachineKind;

    /// Permutation queries allowed per run at size `n`.
    fn query_budget(&self, n: u32) -> u64;

    /// Steps allowed per run at size `n` (one per activation, one per query).
    fn step_budget(&self, n: u32) -> u64 {
        self.query_budget(n).saturating_add(64)
    }

    /// Produce the next action. Oracle queries draw down the budget; an
    /// `Err` from the oracle should be propagated so the runner can record
    /// the forfeit.
    fn act(
        &self,
        view: &View,
        tape: &mut dyn BitSource,
        oracle: &mut Oracle,
    ) -> Result<BitString, CryptoError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForfeitReason {
    IllegalAction,
    QueryBudget,
    StepBudget,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// A terminal history was reached and scored.
    Terminal { history: Vec<BitString>, utilities: Vec<Rational> },
    /// `offender` broke the rules; the listed utilities apply.
    Forfeit { offender: usize, reason: ForfeitReason, utilities: Vec<Rational> },
}

impl Outcome {
    pub fn utilities(&self) -> &[Rational] {
        match self {
            Outcome::Terminal { utilities, .. } => utilities,
            Outcome::Forfeit { utilities, .. } => utilities,
        }
    }

    pub fn terminal_history(&self) -> Option<&[BitString]> {
        match self {
            Outcome::Terminal { history, .. } => Some(history),
            Outcome::Forfeit { .. } => None,
        }
    }
}

/// One activation as the runner saw it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activation {
    pub player: usize,
    pub view: View,
    pub action: BitString,
    /// Tape bits drawn during this activation, in draw order.
    pub drawn: BitString,
    /// Permutation queries charged during this activation.
    pub queries: u64,
}

/// Complete record of one run. Two runs with the same family, size, profile
/// and seed produce identical transcripts.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub n: u32,
    pub seed: u64,
    pub activations: Vec<Activation>,
    pub outcome: Outcome,
    pub queries_used: Vec<u64>,
    pub steps_used: Vec<u64>,
}

fn forfeit_utilities(family: &dyn GameFamily, n: u32, offender: usize) -> Vec<Rational> {
    let (min, _) = family.utility_bounds(n);
    (0..family.num_players())
        .map(|p| if p == offender { min.clone() } else { Rational::zero() })
        .collect()
}

/// Play one run of the size-`n` game. `profile[p]` moves for player `p`.
/// The permutation and each player's tape are derived from `seed`.
pub fn run_game(
    family: &dyn GameFamily,
    n: u32,
    profile: &[&dyn Machine],
    seed: u64,
) -> Transcript {
    run_game_full(family, n, profile, seed).0
}

/// Like [`run_game`], but also hands back the trial's permutation table so
/// verifier-side post-processing (history maps, utility audits) can make
/// inverse queries against the permutation this run actually saw.
pub fn run_game_full(
    family: &dyn GameFamily,
    n: u32,
    profile: &[&dyn Machine],
    seed: u64,
) -> (Transcript, PermTable) {
    let players = family.num_players();
    assert_eq!(profile.len(), players, "profile size must match the family");

    let mut table = PermTable::new(derive(seed, tags::PERM));
    let mut tapes: Vec<RandomTape> = (0..players)
        .map(|p| RandomTape::new(derive(seed, tags::TAPE + p as u64)))
        .collect();
    let mut meters: Vec<QueryMeter> =
        (0..players).map(|p| QueryMeter::with_budget(profile[p].query_budget(n))).collect();
    let mut activations_of = vec![0u64; players];
    let mut segments: Vec<Vec<BitString>> = vec![Vec::new(); players];

    let mut history: Vec<BitString> = Vec::new();
    let mut activations = Vec::new();

    let outcome = loop {
        if family.is_terminal(n, &history) {
            let utilities = family.utilities(n, &history, &mut table);
            assert_eq!(utilities.len(), players, "family returned a bad utility vector");
            break Outcome::Terminal { history: history.clone(), utilities };
        }

        let p = family.player(n, &history);
        assert!(p < players, "family named a mover outside the player set");
        let machine = profile[p];
        activations_of[p] += 1;

        let view = View {
            n,
            player: p,
            history: family.view_component(n, &history),
            consumed: match machine.kind() {
                MachineKind::Stateful => Some(segments[p].clone()),
                MachineKind::Stateless => None,
            },
        };

        let bits_before = tapes[p].consumed_len();
        let queries_before = meters[p].used();
        let result = {
            let mut oracle = Oracle::new(&mut table, &mut meters[p]);
            machine.act(&view, &mut tapes[p], &mut oracle)
        };
        let queries = meters[p].used() - queries_before;
        let drawn = tapes[p].consumed().slice(bits_before, tapes[p].consumed_len());

        let action = match result {
            Ok(a) => a,
            Err(CryptoError::BudgetExceeded) => {
                break Outcome::Forfeit {
                    offender: p,
                    reason: ForfeitReason::QueryBudget,
                    utilities: forfeit_utilities(family, n, p),
                };
            }
            Err(_) => {
                break Outcome::Forfeit {
                    offender: p,
                    reason: ForfeitReason::IllegalAction,
                    utilities: forfeit_utilities(family, n, p),
                };
            }
        };

        if activations_of[p] + meters[p].used() > machine.step_budget(n) {
            break Outcome::Forfeit {
                offender: p,
                reason: ForfeitReason::StepBudget,
                utilities: forfeit_utilities(family, n, p),
            };
        }

        let legal = action.len() <= family.action_length_bound(n) && {
            let mut next = history.clone();
            next.push(action.clone());
            family.is_history(n, &next)
        };
        if !legal {
            break Outcome::Forfeit {
                offender: p,
                reason: ForfeitReason::IllegalAction,
                utilities: forfeit_utilities(family, n, p),
            };
        }

        segments[p].push(drawn.clone());
        activations.push(Activation { player: p, view, action: action.clone(), drawn, queries });
        history.push(action);
    };

    let transcript = Transcript {
        n,
        seed,
        activations,
        outcome,
        queries_used: meters.iter().map(|m| m.used()).collect(),
        steps_used: (0..players).map(|p| activations_of[p] + meters[p].used()).collect(),
    };
    (transcript, table)
}

#[cfg(test)]
mod tests {
    use super::super::family::testgames::{EchoFamily, ParityFamily};
    use super::*;
    use crate::bits::BitReader;
    use num::{One, Zero};

    /// Plays a fixed bit everywhere.
    struct Fixed(bool);

    impl Machine for Fixed {
        fn kind(&self) -> MachineKind {
            MachineKind::Stateless
        }

        fn query_budget(&self, _n: u32) -> u64 {
            0
        }

        fn act(
            &self,
            _view: &View,
            _tape: &mut dyn BitSource,
            _oracle: &mut Oracle,
        ) -> Result<BitString, CryptoError> {
            Ok(BitString::from_u64(self.0 as u64, 1))
        }
    }

    /// Draws a random bit on its first move and repeats it on the second by
    /// replaying its consumed randomness.
    struct Remember;

    impl Machine for Remember {
        fn kind(&self) -> MachineKind {
            MachineKind::Stateful
        }

        fn query_budget(&self, _n: u32) -> u64 {
            0
        }

        fn act(
            &self,
            view: &View,
            tape: &mut dyn BitSource,
            _oracle: &mut Oracle,
        ) -> Result<BitString, CryptoError> {
            let consumed = view.consumed.as_ref().expect("stateful machines see their tape");
            if view.history.is_empty() {
                assert!(consumed.is_empty());
                Ok(tape.take(1))
            } else {
                let flat = crate::bits::flatten(consumed);
                let mut replay = BitReader::new(&flat);
                Ok(replay.take(1))
            }
        }
    }

    /// Emits an action longer than the family allows.
    struct TooLong;

    impl Machine for TooLong {
        fn kind(&self) -> MachineKind {
            MachineKind::Stateless
        }

        fn query_budget(&self, _n: u32) -> u64 {
            0
        }

        fn act(
            &self,
            _view: &View,
            _tape: &mut dyn BitSource,
            _oracle: &mut Oracle,
        ) -> Result<BitString, CryptoError> {
            Ok(BitString::zeros(9))
        }
    }

    /// Burns permutation queries until the meter trips.
    struct Hog;

    impl Machine for Hog {
        fn kind(&self) -> MachineKind {
            MachineKind::Stateless
        }

        fn query_budget(&self, _n: u32) -> u64 {
            3
        }

        fn act(
            &self,
            _view: &View,
            _tape: &mut dyn BitSource,
            oracle: &mut Oracle,
        ) -> Result<BitString, CryptoError> {
            loop {
                oracle.forward(8, 0)?;
            }
        }
    }

    #[test]
    fn deterministic_in_the_seed() {
        let profile: Vec<&dyn Machine> = vec![&Remember];
        let a = run_game(&EchoFamily, 1, &profile, 99);
        let b = run_game(&EchoFamily, 1, &profile, 99);
        assert_eq!(a, b);
        // Different seeds produce different tapes somewhere in a short scan.
        let first_bits: Vec<bool> =
            (0..16).map(|s| run_game(&EchoFamily, 1, &profile, s).activations[0].action.bit(0)).collect();
        assert!(first_bits.iter().any(|&x| x) && first_bits.iter().any(|&x| !x));
    }

    #[test]
    fn stateful_replay_wins_echo() {
        let profile: Vec<&dyn Machine> = vec![&Remember];
        for seed in 0..20 {
            let t = run_game(&EchoFamily, 1, &profile, seed);
            assert_eq!(t.outcome.utilities()[0], Rational::one());
            assert_eq!(t.activations.len(), 2);
            // Second activation replayed instead of drawing fresh bits.
            assert_eq!(t.activations[0].drawn.len(), 1);
            assert_eq!(t.activations[1].drawn.len(), 0);
            let segs = t.activations[1].view.consumed.as_ref().unwrap();
            assert_eq!(segs.len(), 1);
            assert_eq!(segs[0].len(), 1);
        }
    }

    #[test]
    fn stateless_machines_see_no_tape() {
        struct AssertStateless;
        impl Machine for AssertStateless {
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
                assert!(view.consumed.is_none());
                Ok(BitString::from_u64(0, 1))
            }
        }
        let profile: Vec<&dyn Machine> = vec![&AssertStateless];
        let t = run_game(&EchoFamily, 1, &profile, 5);
        assert!(matches!(t.outcome, Outcome::Terminal { .. }));
    }

    #[test]
    fn illegal_action_forfeits_with_min_utility() {
        let long: Vec<&dyn Machine> = vec![&TooLong, &Fixed(false)];
        let t = run_game(&ParityFamily, 4, &long, 1);
        match &t.outcome {
            Outcome::Forfeit { offender, reason, utilities } => {
                assert_eq!(*offender, 0);
                assert_eq!(*reason, ForfeitReason::IllegalAction);
                assert_eq!(utilities[0], Rational::zero());
                assert_eq!(utilities[1], Rational::zero());
            }
            other => panic!("expected forfeit, got {other:?}"),
        }
        assert!(t.activations.is_empty());
    }

    #[test]
    fn forfeit_pays_min_to_offender_only() {
        // In a family with a negative minimum the offender lands below zero.
        struct Neg;
        impl GameFamily for Neg {
            fn name(&self) -> &str {
                "neg"
            }
            fn num_players(&self) -> usize {
                2
            }
            fn action_length_bound(&self, _n: u32) -> usize {
                1
            }
            fn is_history(&self, _n: u32, h: &[BitString]) -> bool {
                h.len() <= 1 && h.iter().all(|a| a.len() == 1)
            }
            fn is_terminal(&self, _n: u32, h: &[BitString]) -> bool {
                h.len() == 1
            }
            fn player(&self, _n: u32, _h: &[BitString]) -> usize {
                1
            }
            fn utilities(&self, _n: u32, _h: &[BitString], _p: &mut PermTable) -> Vec<Rational> {
                vec![Rational::zero(), Rational::zero()]
            }
            fn utility_bounds(&self, _n: u32) -> (Rational, Rational) {
                (-Rational::one(), Rational::one())
            }
            fn enumerate_actions(&self, _n: u32, _h: &[BitString]) -> Vec<BitString> {
                vec![BitString::from_u64(0, 1), BitString::from_u64(1, 1)]
            }
            fn sample_action(
                &self,
                _n: u32,
                _h: &[BitString],
                src: &mut dyn BitSource,
            ) -> BitString {
                src.take(1)
            }
        }
        let profile: Vec<&dyn Machine> = vec![&Fixed(false), &TooLong];
        let t = run_game(&Neg, 1, &profile, 0);
        match &t.outcome {
            Outcome::Forfeit { offender, utilities, .. } => {
                assert_eq!(*offender, 1);
                assert_eq!(utilities[1], -Rational::one());
                assert_eq!(utilities[0], Rational::zero());
            }
            other => panic!("expected forfeit, got {other:?}"),
        }
    }

    #[test]
    fn query_budget_forfeits() {
        let profile: Vec<&dyn Machine> = vec![&Hog, &Fixed(true)];
        let t = run_game(&ParityFamily, 4, &profile, 7);
        match &t.outcome {
            Outcome::Forfeit { offender, reason, .. } => {
                assert_eq!(*offender, 0);
                assert_eq!(*reason, ForfeitReason::QueryBudget);
            }
            other => panic!("expected forfeit, got {other:?}"),
        }
        assert_eq!(t.queries_used[0], 3);
    }

    #[test]
    fn step_budget_counts_activations_and_queries() {
        struct Slow;
        impl Machine for Slow {
            fn kind(&self) -> MachineKind {
                MachineKind::Stateless
            }
            fn query_budget(&self, _n: u32) -> u64 {
                100
            }
            fn step_budget(&self, _n: u32) -> u64 {
                5
            }
            fn act(
                &self,
                _view: &View,
                _tape: &mut dyn BitSource,
                oracle: &mut Oracle,
            ) -> Result<BitString, CryptoError> {
                for _ in 0..5 {
                    oracle.forward(4, 0)?;
                }
                Ok(BitString::from_u64(0, 1))
            }
        }
        // 1 activation + 5 queries = 6 steps > 5 allowed.
        let profile: Vec<&dyn Machine> = vec![&Slow];
        let t = run_game(&EchoFamily, 1, &profile, 2);
        match &t.outcome {
            Outcome::Forfeit { reason, .. } => assert_eq!(*reason, ForfeitReason::StepBudget),
            other => panic!("expected forfeit, got {other:?}"),
        }
    }

    /// Plays the all-ones string of whatever width the stage calls for.
    struct AllOnes;

    impl Machine for AllOnes {
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
            let len = if view.history.is_empty() { view.n as usize } else { 1 };
            Ok(BitString::from_u64((1u64 << len) - 1, len))
        }
    }

    #[test]
    fn views_respect_the_family_partition() {
        let profile: Vec<&dyn Machine> = vec![&AllOnes, &Fixed(false)];
        let t = run_game(&ParityFamily, 3, &profile, 11);
        // Player 1's view of the 3-bit first move is masked to zeros.
        let second = &t.activations[1];
        assert_eq!(second.player, 1);
        assert_eq!(second.view.history, vec![BitString::zeros(3)]);
        match &t.outcome {
            Outcome::Terminal { history, utilities } => {
                assert_eq!(history[0], BitString::from_u64(0b111, 3));
                // Parity of 111 is odd; player 1 guessed 0 and loses.
                assert_eq!(utilities[0], Rational::one());
                assert_eq!(utilities[1], Rational::zero());
            }
            other => panic!("expected terminal, got {other:?}"),
        }
    }
}

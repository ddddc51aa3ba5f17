//! Computational game families.
//!
//! A family assigns to each size `n` a finite extensive-form game whose
//! actions are bitstrings of length at most `action_length_bound(n)`.
//! Histories are sequences of such actions; membership, termination and the
//! mover are purely structural, while terminal utilities may consult the
//! shared permutation (the runner evaluates them verifier-side, so these
//! inverse lookups are never charged to any player's budget).

use crate::bits::{BitSource, BitString};
use crate::crypto::PermTable;
use crate::Rational;

pub trait GameFamily: Sync {
    /// Stable name used in reports and seed derivation notes.
    fn name(&self) -> &str;

    fn num_players(&self) -> usize;

    /// Maximum action bit-length in the size-`n` game.
    fn action_length_bound(&self, n: u32) -> usize;

    /// Prefix-closed history membership.
    fn is_history(&self, n: u32, h: &[BitString]) -> bool;

    fn is_terminal(&self, n: u32, h: &[BitString]) -> bool;

    /// Mover at a nonterminal history.
    fn player(&self, n: u32, h: &[BitString]) -> usize;

    /// Utilities at a terminal history. Evaluation may invert the
    /// permutation; this is the trusted verifier side of the model.
    fn utilities(&self, n: u32, h: &[BitString], perm: &mut PermTable) -> Vec<Rational>;

    /// Inclusive bounds on any single player's terminal utility at size `n`,
    /// used for forfeit payoffs and for scaling statistical radii.
    fn utility_bounds(&self, n: u32) -> (Rational, Rational);

    /// The part of the history the mover is shown. Defaults to perfect
    /// information.
    fn view_component(&self, n: u32, h: &[BitString]) -> Vec<BitString> {
        let _ = n;
        h.to_vec()
    }

    /// All legal actions at a nonterminal history. This is exponential in
    /// general; exhaustive callers gate on game size first.
    fn enumerate_actions(&self, n: u32, h: &[BitString]) -> Vec<BitString>;

    /// A uniformly random legal action, drawn without enumeration.
    fn sample_action(&self, n: u32, h: &[BitString], src: &mut dyn BitSource) -> BitString;
}

/// Total number of histories of the size-`n` game, or `None` once the count
/// exceeds `cap`. Used to gate exhaustive verification.
pub fn count_histories(family: &dyn GameFamily, n: u32, cap: usize) -> Option<usize> {
    let mut total = 0usize;
    let mut frontier = vec![Vec::new()];
    while let Some(h) = frontier.pop() {
        total += 1;
        if total > cap {
            return None;
        }
        if !family.is_terminal(n, &h) {
            for a in family.enumerate_actions(n, &h) {
                let mut child = h.clone();
                child.push(a);
                frontier.push(child);
            }
        }
    }
    Some(total)
}

/// Depth-first enumeration of every history (terminal and not) of the
/// size-`n` game. Panics if the count exceeds `cap`.
pub fn enumerate_histories(family: &dyn GameFamily, n: u32, cap: usize) -> Vec<Vec<BitString>> {
    let mut out = Vec::new();
    let mut frontier = vec![Vec::new()];
    while let Some(h) = frontier.pop() {
        assert!(out.len() < cap, "history enumeration exceeded cap {cap}");
        if !family.is_terminal(n, &h) {
            let mut kids = family.enumerate_actions(n, &h);
            kids.reverse();
            for a in kids {
                let mut child = h.clone();
                child.push(a);
                frontier.push(child);
            }
        }
        out.push(h);
    }
    out
}

/// What a machine is shown when activated: the size, its own index, the
/// visible component of the current history, and (for stateful machines
/// only) the exact randomness it consumed in its earlier activations, one
/// segment per activation. Keeping the segments separate lets wrapper
/// machines strip their own draws before delegating to the machine they
/// wrap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct View {
    pub n: u32,
    pub player: usize,
    pub history: Vec<BitString>,
    pub consumed: Option<Vec<BitString>>,
}

#[cfg(test)]
pub(crate) mod testgames {
    use super::*;
    use num::{One, Zero};

    /// Two one-bit moves by a single player; pays 1 iff the bits agree.
    pub struct EchoFamily;

    impl GameFamily for EchoFamily {
        fn name(&self) -> &str {
            "echo"
        }

        fn num_players(&self) -> usize {
            1
        }

        fn action_length_bound(&self, _n: u32) -> usize {
            1
        }

        fn is_history(&self, _n: u32, h: &[BitString]) -> bool {
            h.len() <= 2 && h.iter().all(|a| a.len() == 1)
        }

        fn is_terminal(&self, _n: u32, h: &[BitString]) -> bool {
            h.len() == 2
        }

        fn player(&self, _n: u32, _h: &[BitString]) -> usize {
            0
        }

        fn utilities(&self, _n: u32, h: &[BitString], _perm: &mut PermTable) -> Vec<Rational> {
            if h[0] == h[1] {
                vec![Rational::one()]
            } else {
                vec![Rational::zero()]
            }
        }

        fn utility_bounds(&self, _n: u32) -> (Rational, Rational) {
            (Rational::zero(), Rational::one())
        }

        fn enumerate_actions(&self, _n: u32, _h: &[BitString]) -> Vec<BitString> {
            vec![BitString::from_u64(0, 1), BitString::from_u64(1, 1)]
        }

        fn sample_action(&self, _n: u32, _h: &[BitString], src: &mut dyn BitSource) -> BitString {
            src.take(1)
        }
    }

    /// Player 0 plays `n` bits, player 1 answers with one bit; player 1 wins
    /// (1, and player 0 gets 0) iff their bit equals the parity of player
    /// 0's string. Player 1 sees only the length of the first move.
    pub struct ParityFamily;

    impl GameFamily for ParityFamily {
        fn name(&self) -> &str {
            "parity"
        }

        fn num_players(&self) -> usize {
            2
        }

        fn action_length_bound(&self, n: u32) -> usize {
            n as usize
        }

        fn is_history(&self, n: u32, h: &[BitString]) -> bool {
            match h.len() {
                0 => true,
                1 => h[0].len() == n as usize,
                2 => h[0].len() == n as usize && h[1].len() == 1,
                _ => false,
            }
        }

        fn is_terminal(&self, _n: u32, h: &[BitString]) -> bool {
            h.len() == 2
        }

        fn player(&self, _n: u32, h: &[BitString]) -> usize {
            h.len()
        }

        fn utilities(&self, _n: u32, h: &[BitString], _perm: &mut PermTable) -> Vec<Rational> {
            let parity = h[0].count_ones() % 2 == 1;
            if h[1].bit(0) == parity {
                vec![Rational::zero(), Rational::one()]
            } else {
                vec![Rational::one(), Rational::zero()]
            }
        }

        fn utility_bounds(&self, _n: u32) -> (Rational, Rational) {
            (Rational::zero(), Rational::one())
        }

        fn view_component(&self, _n: u32, h: &[BitString]) -> Vec<BitString> {
            // The responder is not shown the committed string itself.
            h.iter().map(|a| BitString::zeros(a.len())).collect()
        }

        fn enumerate_actions(&self, n: u32, h: &[BitString]) -> Vec<BitString> {
            let width = if h.is_empty() { n as usize } else { 1 };
            (0..1u64 << width).map(|v| BitString::from_u64(v, width)).collect()
        }

        fn sample_action(&self, n: u32, h: &[BitString], src: &mut dyn BitSource) -> BitString {
            src.take(if h.is_empty() { n as usize } else { 1 })
        }
    }

    /// [`ParityFamily`] without the masking: the responder sees the string
    /// it is guessing about. Deliberately leaky, for negative tests.
    pub struct OpenParityFamily;

    impl GameFamily for OpenParityFamily {
        fn name(&self) -> &str {
            "parity-open"
        }

        fn num_players(&self) -> usize {
            ParityFamily.num_players()
        }

        fn action_length_bound(&self, n: u32) -> usize {
            ParityFamily.action_length_bound(n)
        }

        fn is_history(&self, n: u32, h: &[BitString]) -> bool {
            ParityFamily.is_history(n, h)
        }

        fn is_terminal(&self, n: u32, h: &[BitString]) -> bool {
            ParityFamily.is_terminal(n, h)
        }

        fn player(&self, n: u32, h: &[BitString]) -> usize {
            ParityFamily.player(n, h)
        }

        fn utilities(&self, n: u32, h: &[BitString], perm: &mut PermTable) -> Vec<Rational> {
            ParityFamily.utilities(n, h, perm)
        }

        fn utility_bounds(&self, n: u32) -> (Rational, Rational) {
            ParityFamily.utility_bounds(n)
        }

        fn enumerate_actions(&self, n: u32, h: &[BitString]) -> Vec<BitString> {
            ParityFamily.enumerate_actions(n, h)
        }

        fn sample_action(&self, n: u32, h: &[BitString], src: &mut dyn BitSource) -> BitString {
            ParityFamily.sample_action(n, h, src)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testgames::{EchoFamily, ParityFamily};
    use super::*;

    #[test]
    fn history_enumeration_counts_match() {
        assert_eq!(count_histories(&EchoFamily, 1, 100), Some(7));
        assert_eq!(count_histories(&ParityFamily, 2, 100), Some(13));
        assert_eq!(count_histories(&ParityFamily, 4, 10), None);
        let all = enumerate_histories(&ParityFamily, 2, 100);
        assert_eq!(all.len(), 13);
        assert!(all.iter().all(|h| ParityFamily.is_history(2, h)));
        assert_eq!(all.iter().filter(|h| ParityFamily.is_terminal(2, h)).count(), 8);
    }

    #[test]
    fn default_view_is_full_history() {
        let h = vec![BitString::from_u64(1, 1)];
        assert_eq!(EchoFamily.view_component(1, &h), h);
        // ParityFamily overrides it to hide the bits.
        assert_eq!(ParityFamily.view_component(2, &h)[0], BitString::zeros(1));
    }
}

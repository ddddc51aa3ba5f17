//! Small games used by tests and the exactness suites. All are well under
//! fifty histories and, except where noted, have perfect recall.

use num::FromPrimitive;

use super::tree::{GameTree, RawGame, RawNode};
use crate::Rational;

fn q(n: i64) -> Rational {
    Rational::from_i64(n).unwrap()
}

fn qr(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn dec(player: usize, infoset: &str) -> RawNode {
    RawNode::Decision { player, infoset: infoset.into() }
}

fn term(us: Vec<Rational>) -> RawNode {
    RawNode::Terminal { utilities: us }
}

fn h(parts: &[&str]) -> Vec<String> {
    parts.iter().map(|s| s.to_string()).collect()
}

/// One-shot matching: player 1 hides a bit, player 2 guesses blind.
/// Win-or-lose utilities.
pub fn matching_bits() -> GameTree {
    let mut entries = vec![(h(&[]), dec(0, "hide"))];
    for a in ["x", "y"] {
        entries.push((h(&[a]), dec(1, "guess")));
        for b in ["l", "r"] {
            let matched = (a == "x") == (b == "l");
            entries.push((h(&[a, b]), term(vec![q(!matched as i64), q(matched as i64)])));
        }
    }
    GameTree::from_raw(&RawGame { num_players: 2, entries }).unwrap()
}

/// Player 1 moves, player 2 responds blind, player 1 moves again knowing its
/// own first move but not player 2's. Exercises nontrivial mixed/behavioral
/// conversion.
pub fn two_stage_recall() -> GameTree {
    let mut entries = vec![(h(&[]), dec(0, "first"))];
    for (a, second, acts) in [("L", "afterL", ["p", "q"]), ("R", "afterR", ["s", "t"])] {
        entries.push((h(&[a]), dec(1, "mid")));
        for b in ["u", "d"] {
            entries.push((h(&[a, b]), dec(0, second)));
            for (k, c) in acts.iter().enumerate() {
                let base = if a == "L" { 1 } else { -1 };
                let v = qr(base * (k as i64 + 1), if b == "u" { 2 } else { 3 });
                entries.push((h(&[a, b, c]), term(vec![v.clone(), -v])));
            }
        }
    }
    GameTree::from_raw(&RawGame { num_players: 2, entries }).unwrap()
}

/// Player 1 moves twice and the second information set pools both first
/// moves: deliberately violates perfect recall.
pub fn forgetful() -> GameTree {
    let mut entries = vec![(h(&[]), dec(0, "pick"))];
    for a in ["f", "g"] {
        entries.push((h(&[a]), dec(0, "forgot")));
        for (i, b) in ["m", "n"].iter().enumerate() {
            let v = q(if a == "f" { i as i64 } else { 1 - i as i64 });
            entries.push((h(&[a, b]), term(vec![v])));
        }
    }
    GameTree::from_raw(&RawGame { num_players: 1, entries }).unwrap()
}

/// Entry deterrence: staying out yields (0,2); entering makes player 2
/// choose between a self-harming fight (-1,-1) and acquiescing (1,1).
/// (out, fight) is a Nash equilibrium resting on an empty threat.
pub fn entry_game() -> GameTree {
    let entries = vec![
        (h(&[]), dec(0, "door")),
        (h(&["out"]), term(vec![q(0), q(2)])),
        (h(&["in"]), dec(1, "response")),
        (h(&["in", "fight"]), term(vec![q(-1), q(-1)])),
        (h(&["in", "yield"]), term(vec![q(1), q(1)])),
    ];
    GameTree::from_raw(&RawGame { num_players: 2, entries }).unwrap()
}

/// Three-level perfect-information game with rational payoffs.
pub fn perfect_info_chain() -> GameTree {
    let mut entries = vec![(h(&[]), dec(0, "a0"))];
    for a in ["w", "e"] {
        entries.push((h(&[a]), dec(1, &format!("b{a}"))));
        for b in ["n", "s"] {
            let lbl = format!("{b}{a}");
            entries.push((h(&[a, &lbl]), dec(0, &format!("c{a}{b}"))));
            for c in ["h", "t"] {
                let lbl2 = format!("{c}{a}{b}");
                let u0 = qr(
                    (a == "w") as i64 * 2 + (b == "n") as i64 - (c == "t") as i64 * 3,
                    2,
                );
                entries.push((h(&[a, &lbl, &lbl2]), term(vec![u0.clone(), q(1) - u0])));
            }
        }
    }
    GameTree::from_raw(&RawGame { num_players: 2, entries }).unwrap()
}

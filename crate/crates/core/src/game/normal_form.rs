//! Normal-form games and their extensive-form embedding.

use std::collections::BTreeMap;

use super::strategy::{BehavioralStrategy, DeterministicStrategy, Strategy, StrategyProfile};
use super::tree::{ActionId, GameTree, InfoSetId, RawGame, RawNode};
use super::GameError;
use crate::Rational;

/// A finite normal-form game: per-player action labels and a flat utility
/// table in row-major order with player 0 varying slowest.
#[derive(Debug, Clone)]
pub struct NormalFormGame {
    pub labels: Vec<Vec<String>>,
    pub utilities: Vec<Vec<Rational>>,
}

impl NormalFormGame {
    pub fn new(labels: Vec<Vec<String>>, utilities: Vec<Vec<Rational>>) -> Result<Self, GameError> {
        let cells: usize = labels.iter().map(Vec::len).product();
        if labels.iter().any(|l| l.len() < 2) {
            return Err(GameError::Unsupported(
                "every player needs at least two actions".into(),
            ));
        }
        if utilities.len() != cells {
            return Err(GameError::Unsupported(format!(
                "utility table has {} rows for {} action profiles",
                utilities.len(),
                cells
            )));
        }
        if utilities.iter().any(|row| row.len() != labels.len()) {
            return Err(GameError::Unsupported("utility row of the wrong width".into()));
        }
        Ok(NormalFormGame { labels, utilities })
    }

    /// Numeric labels "0", "1", ... for the given action counts.
    pub fn numbered(counts: &[usize], utilities: Vec<Vec<Rational>>) -> Result<Self, GameError> {
        let labels = counts.iter().map(|&n| (0..n).map(|j| j.to_string()).collect()).collect();
        NormalFormGame::new(labels, utilities)
    }

    pub fn num_players(&self) -> usize {
        self.labels.len()
    }

    pub fn action_count(&self, player: usize) -> usize {
        self.labels[player].len()
    }

    pub fn index(&self, profile: &[usize]) -> usize {
        assert_eq!(profile.len(), self.num_players());
        let mut idx = 0;
        for (p, &a) in profile.iter().enumerate() {
            assert!(a < self.action_count(p));
            idx = idx * self.action_count(p) + a;
        }
        idx
    }

    pub fn utility(&self, profile: &[usize], player: usize) -> &Rational {
        &self.utilities[self.index(profile)][player]
    }
}

/// A normal-form game embedded as a one-shot extensive-form game: each
/// player moves exactly once, blind, at a single information set. Player 1
/// (index 1) moves first, then player 0, then the rest in index order; the
/// order is irrelevant strategically but fixes the tree shape.
#[derive(Debug, Clone)]
pub struct EmbeddedGame {
    pub game: GameTree,
    pub mover_order: Vec<usize>,
    /// The single information set of each player.
    pub cells: Vec<InfoSetId>,
    /// Interned action ids per player, aligned with the normal form's labels.
    pub actions: Vec<Vec<ActionId>>,
}

impl EmbeddedGame {
    /// Deterministic profile playing `picks[p]` for each player.
    pub fn pure(&self, picks: &[usize]) -> StrategyProfile {
        StrategyProfile::new(
            picks
                .iter()
                .enumerate()
                .map(|(p, &a)| {
                    let mut choices = BTreeMap::new();
                    choices.insert(self.cells[p], self.actions[p][a]);
                    Strategy::Pure(DeterministicStrategy { player: p, choices })
                })
                .collect(),
        )
    }

    /// Behavioral profile where each player independently randomizes
    /// according to their row of `dists`.
    pub fn randomized(&self, dists: &[Vec<Rational>]) -> StrategyProfile {
        StrategyProfile::new(
            dists
                .iter()
                .enumerate()
                .map(|(p, row)| {
                    let dist = self.actions[p].iter().copied().zip(row.iter().cloned()).collect();
                    let mut cells = BTreeMap::new();
                    cells.insert(self.cells[p], dist);
                    Strategy::Behavioral(BehavioralStrategy { player: p, dists: cells })
                })
                .collect(),
        )
    }
}

pub fn embed_normal_form(nf: &NormalFormGame) -> Result<EmbeddedGame, GameError> {
    let c = nf.num_players();
    let mover_order: Vec<usize> = if c >= 2 {
        [1, 0].into_iter().chain(2..c).collect()
    } else {
        vec![0]
    };

    let mut entries: Vec<(Vec<String>, RawNode)> = Vec::new();
    // Histories at depth d are label sequences of the first d movers.
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for &mover in &mover_order {
        for picks in &frontier {
            let h = history_labels(nf, &mover_order, picks);
            entries.push((h, RawNode::Decision { player: mover, infoset: format!("nf:p{mover}") }));
        }
        let mut next = Vec::new();
        for picks in &frontier {
            for a in 0..nf.action_count(mover) {
                let mut ext = picks.clone();
                ext.push(a);
                next.push(ext);
            }
        }
        frontier = next;
    }
    for picks in &frontier {
        let mut profile = vec![0usize; c];
        for (d, &mover) in mover_order.iter().enumerate() {
            profile[mover] = picks[d];
        }
        let h = history_labels(nf, &mover_order, picks);
        entries.push((
            h,
            RawNode::Terminal { utilities: nf.utilities[nf.index(&profile)].clone() },
        ));
    }

    let game = GameTree::from_raw(&RawGame { num_players: c, entries })
        .map_err(GameError::Invalid)?;
    let cells = (0..c)
        .map(|p| game.infoset_by_label(&format!("nf:p{p}")).unwrap())
        .collect();
    let actions = (0..c)
        .map(|p| {
            nf.labels[p]
                .iter()
                .map(|l| game.action_by_label(&format!("p{p}:{l}")).unwrap())
                .collect()
        })
        .collect();
    Ok(EmbeddedGame { game, mover_order, cells, actions })
}

fn history_labels(nf: &NormalFormGame, order: &[usize], picks: &[usize]) -> Vec<String> {
    picks
        .iter()
        .enumerate()
        .map(|(d, &a)| format!("p{}:{}", order[d], nf.labels[order[d]][a]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::dist::expected_utility;
    use crate::game::ne::check_epsilon_ne;
    use crate::game::strategy::uniform_profile;
    use num::Zero;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pennies() -> NormalFormGame {
        // Player 0 wants a mismatch, player 1 a match, on a 0/1 win scale.
        let rows = vec![
            vec![q(0, 1), q(1, 1)],
            vec![q(1, 1), q(0, 1)],
            vec![q(1, 1), q(0, 1)],
            vec![q(0, 1), q(1, 1)],
        ];
        NormalFormGame::numbered(&[2, 2], rows).unwrap()
    }

    #[test]
    fn embedding_shape() {
        let e = embed_normal_form(&pennies()).unwrap();
        assert_eq!(e.mover_order, vec![1, 0]);
        assert_eq!(e.game.num_nodes(), 7);
        assert_eq!(e.game.player_at(e.game.root()), Some(1));
        assert_eq!(e.game.infoset(e.cells[0]).members.len(), 2);
        assert_eq!(e.game.infoset(e.cells[1]).members.len(), 1);
    }

    #[test]
    fn utilities_match_the_table() {
        let nf = pennies();
        let e = embed_normal_form(&nf).unwrap();
        for a0 in 0..2 {
            for a1 in 0..2 {
                for p in 0..2 {
                    let eu = expected_utility(&e.game, &e.pure(&[a0, a1]), p).unwrap();
                    assert_eq!(&eu, nf.utility(&[a0, a1], p));
                }
            }
        }
    }

    #[test]
    fn uniform_is_the_embedded_equilibrium() {
        let e = embed_normal_form(&pennies()).unwrap();
        let rep = check_epsilon_ne(&e.game, &uniform_profile(&e.game), &Rational::zero()).unwrap();
        assert!(rep.is_ne());
        let rep = check_epsilon_ne(&e.game, &e.pure(&[0, 0]), &Rational::zero()).unwrap();
        assert!(!rep.is_ne());
    }

    #[test]
    fn three_player_order_and_lookup() {
        let mut rows = Vec::new();
        for a0 in 0..2i64 {
            for a1 in 0..2i64 {
                for a2 in 0..2i64 {
                    rows.push(vec![q(a0, 1), q(a1, 1), q(a0 * a1 * a2, 1)]);
                }
            }
        }
        let nf = NormalFormGame::numbered(&[2, 2, 2], rows).unwrap();
        let e = embed_normal_form(&nf).unwrap();
        assert_eq!(e.mover_order, vec![1, 0, 2]);
        assert_eq!(e.game.num_nodes(), 1 + 2 + 4 + 8);
        let eu = expected_utility(&e.game, &e.pure(&[1, 1, 1]), 2).unwrap();
        assert_eq!(eu, q(1, 1));
        let eu = expected_utility(&e.game, &e.pure(&[1, 0, 1]), 2).unwrap();
        assert_eq!(eu, q(0, 1));
    }

    #[test]
    fn randomized_profiles_average_the_table() {
        let nf = pennies();
        let e = embed_normal_form(&nf).unwrap();
        let p = e.randomized(&[vec![q(1, 4), q(3, 4)], vec![q(1, 2), q(1, 2)]]);
        let eu = expected_utility(&e.game, &p, 1).unwrap();
        assert_eq!(eu, q(1, 2));
    }
}

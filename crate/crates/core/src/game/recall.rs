//! Experience sequences and the perfect-recall test.

use super::tree::{ActionId, GameTree, InfoSetId, NodeId};

/// What `player` remembers of their own play on the way to `node`: the
/// (information set, action) pair at every proper prefix where they move.
pub fn experience(g: &GameTree, node: NodeId, player: usize) -> Vec<(InfoSetId, ActionId)> {
    let mut path = vec![node];
    while let Some(p) = g.node(*path.last().unwrap()).parent {
        path.push(p);
    }
    path.reverse();
    let mut exp = Vec::new();
    for w in path.windows(2) {
        if g.player_at(w[0]) == Some(player) {
            exp.push((g.infoset_at(w[0]).unwrap(), g.last_action(w[1]).unwrap()));
        }
    }
    exp
}

/// A player has perfect recall when all members of each of their information
/// sets share one experience sequence.
pub fn player_has_perfect_recall(g: &GameTree, player: usize) -> bool {
    g.infosets_of(player).all(|i| {
        let members = &g.infoset(i).members;
        let first = experience(g, members[0], player);
        members[1..].iter().all(|&m| experience(g, m, player) == first)
    })
}

pub fn has_perfect_recall(g: &GameTree) -> bool {
    (0..g.num_players()).all(|p| player_has_perfect_recall(g, p))
}

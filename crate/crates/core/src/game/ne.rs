//! Exact best responses and the epsilon-Nash test against pure deviations.

use std::collections::{BTreeMap, HashMap};

use num::Zero;

use super::dist::expected_utility;
use super::kuhn::to_behavioral;
use super::recall::{experience, player_has_perfect_recall};
use super::strategy::{
    enumerate_pure_strategies, BehavioralStrategy, DeterministicStrategy, Strategy,
    StrategyProfile,
};
use super::tree::{ActionId, GameTree, InfoSetId, NodeId, NodeKind};
use super::GameError;
use crate::Rational;

/// One player's exact incentive to deviate from a profile.
#[derive(Debug, Clone)]
pub struct PlayerGain {
    pub player: usize,
    /// Expected utility under the profile as given.
    pub current: Rational,
    /// Best expected utility over all deterministic deviations.
    pub best: Rational,
    /// `best - current`; never negative.
    pub gain: Rational,
    pub deviation: DeterministicStrategy,
}

#[derive(Debug, Clone)]
pub struct NeReport {
    pub epsilon: Rational,
    pub gains: Vec<PlayerGain>,
}

impl NeReport {
    /// Does the profile sit within `epsilon` of unilateral pure deviations?
    pub fn is_ne(&self) -> bool {
        self.gains.iter().all(|g| g.gain <= self.epsilon)
    }

    pub fn max_gain(&self) -> Rational {
        self.gains.iter().map(|g| g.gain.clone()).max().unwrap_or_else(Rational::zero)
    }
}

/// A best deterministic response for `player` against the rest of the
/// profile, with its expected utility. Uses an information-set dynamic
/// program when recall permits, falling back to enumeration otherwise.
pub fn best_response(
    g: &GameTree,
    profile: &StrategyProfile,
    player: usize,
) -> Result<(DeterministicStrategy, Rational), GameError> {
    profile.validate(g)?;
    let dp_ok = player_has_perfect_recall(g, player)
        && (0..g.num_players()).all(|q| {
            q == player
                || match profile.get(q) {
                    Strategy::Mixed(_) => player_has_perfect_recall(g, q),
                    _ => true,
                }
        });
    if dp_ok {
        best_response_dp(g, profile, player)
    } else {
        best_response_enumeration(g, profile, player)
    }
}

/// Reach weight of every node counting only the other players' moves.
fn opponent_reach(
    g: &GameTree,
    opp: &[Option<BehavioralStrategy>],
    player: usize,
) -> Vec<Rational> {
    let mut w = vec![Rational::zero(); g.num_nodes()];
    w[g.root().0] = num::One::one();
    // Node ids are topologically sorted, so one forward pass suffices.
    for id in g.node_ids() {
        if let NodeKind::Decision { player: mover, infoset, children } = &g.node(id).kind {
            for &(a, child) in children {
                w[child.0] = if *mover == player {
                    w[id.0].clone()
                } else {
                    w[id.0].clone() * opp[*mover].as_ref().unwrap().prob(*infoset, a)
                };
            }
        }
    }
    w
}

fn continuation_value(
    g: &GameTree,
    node: NodeId,
    player: usize,
    opp: &[Option<BehavioralStrategy>],
    choices: &BTreeMap<InfoSetId, ActionId>,
    cache: &mut HashMap<NodeId, Rational>,
) -> Rational {
    if let Some(v) = cache.get(&node) {
        return v.clone();
    }
    let v = match &g.node(node).kind {
        NodeKind::Terminal { utilities } => utilities[player].clone(),
        NodeKind::Decision { player: mover, infoset, children } => {
            if *mover == player {
                let a = choices.get(infoset).copied().expect("deeper set already decided");
                let child = children.iter().find(|&&(b, _)| b == a).unwrap().1;
                continuation_value(g, child, player, opp, choices, cache)
            } else {
                let beta = opp[*mover].as_ref().unwrap();
                let mut acc = Rational::zero();
                for &(a, child) in children {
                    let p = beta.prob(*infoset, a);
                    if !p.is_zero() {
                        acc += p * continuation_value(g, child, player, opp, choices, cache);
                    }
                }
                acc
            }
        }
    };
    cache.insert(node, v.clone());
    v
}

/// The deepest-first dynamic program: optimal action per own information
/// set against behavioral opponents. Requires perfect recall for `player`.
pub(super) fn dp_choose(
    g: &GameTree,
    opp: &[Option<BehavioralStrategy>],
    player: usize,
) -> BTreeMap<InfoSetId, ActionId> {
    let reach = opponent_reach(g, opp, player);

    // Own information sets, deepest experience first, so that by the time a
    // set is scored every own set reachable below it is already decided.
    let mut order: Vec<(usize, InfoSetId)> = g
        .infosets_of(player)
        .map(|i| (experience(g, g.infoset(i).members[0], player).len(), i))
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut choices: BTreeMap<InfoSetId, ActionId> = BTreeMap::new();
    let mut cache: HashMap<NodeId, Rational> = HashMap::new();
    for (_, i) in order {
        let members = g.infoset(i).members.clone();
        let mut best: Option<(ActionId, Rational)> = None;
        for &a in &g.infoset(i).actions {
            let mut score = Rational::zero();
            for &h in &members {
                if reach[h.0].is_zero() {
                    continue;
                }
                let child = g.child(h, a).unwrap();
                score += reach[h.0].clone()
                    * continuation_value(g, child, player, opp, &choices, &mut cache);
            }
            if best.as_ref().is_none_or(|(_, s)| &score > s) {
                best = Some((a, score));
            }
        }
        choices.insert(i, best.unwrap().0);
    }
    choices
}

fn best_response_dp(
    g: &GameTree,
    profile: &StrategyProfile,
    player: usize,
) -> Result<(DeterministicStrategy, Rational), GameError> {
    let mut opp: Vec<Option<BehavioralStrategy>> = Vec::new();
    for q in 0..g.num_players() {
        opp.push(if q == player { None } else { Some(to_behavioral(g, profile.get(q))?) });
    }
    let choices = dp_choose(g, &opp, player);
    let mut cache: HashMap<NodeId, Rational> = HashMap::new();
    let value = continuation_value(g, g.root(), player, &opp, &choices, &mut cache);
    Ok((DeterministicStrategy { player, choices }, value))
}

fn best_response_enumeration(
    g: &GameTree,
    profile: &StrategyProfile,
    player: usize,
) -> Result<(DeterministicStrategy, Rational), GameError> {
    let mut best: Option<(DeterministicStrategy, Rational)> = None;
    for d in enumerate_pure_strategies(g, player) {
        let eu = expected_utility(g, &profile.with(player, Strategy::Pure(d.clone())), player)?;
        if best.as_ref().is_none_or(|(_, v)| &eu > v) {
            best = Some((d, eu));
        }
    }
    Ok(best.expect("a player always has at least one pure strategy"))
}

/// Compare every player's profile payoff with their best deterministic
/// deviation. All arithmetic is exact.
pub fn check_epsilon_ne(
    g: &GameTree,
    profile: &StrategyProfile,
    epsilon: &Rational,
) -> Result<NeReport, GameError> {
    let mut gains = Vec::new();
    for p in 0..g.num_players() {
        let current = expected_utility(g, profile, p)?;
        let (deviation, best) = best_response(g, profile, p)?;
        let gain = best.clone() - current.clone();
        gains.push(PlayerGain { player: p, current, best, gain, deviation });
    }
    Ok(NeReport { epsilon: epsilon.clone(), gains })
}

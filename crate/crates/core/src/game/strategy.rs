//! Deterministic, mixed, and behavioral strategies.

use std::collections::BTreeMap;

use num::{One, Zero};

use super::tree::{ActionId, GameTree, InfoSetId};
use super::GameError;
use crate::Rational;

/// One action per information set of the owning player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicStrategy {
    pub player: usize,
    pub choices: BTreeMap<InfoSetId, ActionId>,
}

impl DeterministicStrategy {
    pub fn from_labels(g: &GameTree, player: usize, picks: &[(&str, &str)]) -> Self {
        let choices = picks
            .iter()
            .map(|(i, a)| {
                (
                    g.infoset_by_label(i).unwrap_or_else(|| panic!("no infoset {i}")),
                    g.action_by_label(a).unwrap_or_else(|| panic!("no action {a}")),
                )
            })
            .collect();
        DeterministicStrategy { player, choices }
    }

    pub fn describe(&self, g: &GameTree) -> String {
        self.choices
            .iter()
            .map(|(i, a)| format!("{}={}", g.infoset(*i).label, g.action_label(*a)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A finite-support distribution over deterministic strategies.
#[derive(Debug, Clone)]
pub struct MixedStrategy {
    pub player: usize,
    pub atoms: Vec<(Rational, DeterministicStrategy)>,
}

/// An action distribution at each information set of the owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehavioralStrategy {
    pub player: usize,
    pub dists: BTreeMap<InfoSetId, Vec<(ActionId, Rational)>>,
}

impl BehavioralStrategy {
    /// Probability of `action` at `infoset` (zero if unlisted).
    pub fn prob(&self, infoset: InfoSetId, action: ActionId) -> Rational {
        self.dists
            .get(&infoset)
            .and_then(|d| d.iter().find(|&&(a, _)| a == action))
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rational::zero)
    }
}

#[derive(Debug, Clone)]
pub enum Strategy {
    Pure(DeterministicStrategy),
    Mixed(MixedStrategy),
    Behavioral(BehavioralStrategy),
}

impl Strategy {
    pub fn player(&self) -> usize {
        match self {
            Strategy::Pure(s) => s.player,
            Strategy::Mixed(s) => s.player,
            Strategy::Behavioral(s) => s.player,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StrategyProfile {
    pub strategies: Vec<Strategy>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<Strategy>) -> Self {
        StrategyProfile { strategies }
    }

    pub fn get(&self, player: usize) -> &Strategy {
        &self.strategies[player]
    }

    /// Copy with one player's strategy swapped out.
    pub fn with(&self, player: usize, s: Strategy) -> StrategyProfile {
        let mut out = self.clone();
        out.strategies[player] = s;
        out
    }

    pub fn validate(&self, g: &GameTree) -> Result<(), GameError> {
        if self.strategies.len() != g.num_players() {
            return Err(GameError::BadStrategy(format!(
                "profile lists {} strategies for a {}-player game",
                self.strategies.len(),
                g.num_players()
            )));
        }
        for (p, s) in self.strategies.iter().enumerate() {
            if s.player() != p {
                return Err(GameError::BadStrategy(format!(
                    "slot {p} holds a strategy for player {}",
                    s.player() + 1
                )));
            }
            validate_strategy(g, s)?;
        }
        Ok(())
    }
}

fn validate_deterministic(g: &GameTree, s: &DeterministicStrategy) -> Result<(), GameError> {
    for i in g.infosets_of(s.player) {
        let Some(&a) = s.choices.get(&i) else {
            return Err(GameError::BadStrategy(format!(
                "no choice at information set {}",
                g.infoset(i).label
            )));
        };
        if !g.infoset(i).actions.contains(&a) {
            return Err(GameError::BadStrategy(format!(
                "action {} unavailable at {}",
                g.action_label(a),
                g.infoset(i).label
            )));
        }
    }
    Ok(())
}

pub(super) fn validate_mixed(g: &GameTree, m: &MixedStrategy) -> Result<(), GameError> {
    let mut total = Rational::zero();
    for (w, d) in &m.atoms {
        if w <= &Rational::zero() {
            return Err(GameError::BadStrategy("nonpositive atom weight".into()));
        }
        if d.player != m.player {
            return Err(GameError::BadStrategy("atom owned by another player".into()));
        }
        validate_deterministic(g, d)?;
        total += w;
    }
    if !total.is_one() {
        return Err(GameError::BadStrategy(format!("atom weights sum to {total}")));
    }
    Ok(())
}

pub(super) fn validate_behavioral(g: &GameTree, b: &BehavioralStrategy) -> Result<(), GameError> {
    for i in g.infosets_of(b.player) {
        let Some(dist) = b.dists.get(&i) else {
            return Err(GameError::BadStrategy(format!(
                "no distribution at information set {}",
                g.infoset(i).label
            )));
        };
        let mut total = Rational::zero();
        for (a, p) in dist {
            if !g.infoset(i).actions.contains(a) {
                return Err(GameError::BadStrategy(format!(
                    "action {} unavailable at {}",
                    g.action_label(*a),
                    g.infoset(i).label
                )));
            }
            if p < &Rational::zero() {
                return Err(GameError::BadStrategy("negative probability".into()));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(GameError::BadStrategy(format!(
                "probabilities at {} sum to {total}",
                g.infoset(i).label
            )));
        }
    }
    Ok(())
}

pub fn validate_strategy(g: &GameTree, s: &Strategy) -> Result<(), GameError> {
    match s {
        Strategy::Pure(d) => validate_deterministic(g, d),
        Strategy::Mixed(m) => validate_mixed(g, m),
        Strategy::Behavioral(b) => validate_behavioral(g, b),
    }
}

/// Uniform action distribution at every information set of `player`.
pub fn uniform_behavioral(g: &GameTree, player: usize) -> BehavioralStrategy {
    let mut dists = BTreeMap::new();
    for i in g.infosets_of(player) {
        let actions = &g.infoset(i).actions;
        let p = Rational::new(1.into(), (actions.len() as i64).into());
        dists.insert(i, actions.iter().map(|&a| (a, p.clone())).collect());
    }
    BehavioralStrategy { player, dists }
}

/// Everyone plays uniformly.
pub fn uniform_profile(g: &GameTree) -> StrategyProfile {
    StrategyProfile::new(
        (0..g.num_players()).map(|p| Strategy::Behavioral(uniform_behavioral(g, p))).collect(),
    )
}

/// Pointwise mixture `(1-w)·a + w·b` of two behavioral strategies.
pub fn mix_behavioral(
    g: &GameTree,
    a: &BehavioralStrategy,
    b: &BehavioralStrategy,
    w: &Rational,
) -> BehavioralStrategy {
    assert_eq!(a.player, b.player);
    let mut dists = BTreeMap::new();
    for i in g.infosets_of(a.player) {
        let dist = g
            .infoset(i)
            .actions
            .iter()
            .map(|&act| {
                let p = (Rational::one() - w) * a.prob(i, act) + w * b.prob(i, act);
                (act, p)
            })
            .collect();
        dists.insert(i, dist);
    }
    BehavioralStrategy { player: a.player, dists }
}

/// All deterministic strategies of a player (cartesian product over the
/// player's information sets). Exponential; intended for small games.
pub fn enumerate_pure_strategies(g: &GameTree, player: usize) -> Vec<DeterministicStrategy> {
    let cells: Vec<InfoSetId> = g.infosets_of(player).collect();
    let mut out = vec![DeterministicStrategy { player, choices: BTreeMap::new() }];
    for &i in &cells {
        let mut next = Vec::with_capacity(out.len() * g.infoset(i).actions.len());
        for base in &out {
            for &a in &g.infoset(i).actions {
                let mut s = base.clone();
                s.choices.insert(i, a);
                next.push(s);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::samples;

    #[test]
    fn uniform_profile_validates() {
        let g = samples::matching_bits();
        uniform_profile(&g).validate(&g).unwrap();
    }

    #[test]
    fn enumeration_counts() {
        let g = samples::matching_bits();
        assert_eq!(enumerate_pure_strategies(&g, 0).len(), 2);
        assert_eq!(enumerate_pure_strategies(&g, 1).len(), 2);
    }

    #[test]
    fn bad_profiles_rejected() {
        let g = samples::matching_bits();
        let p = StrategyProfile::new(vec![Strategy::Behavioral(uniform_behavioral(&g, 0))]);
        assert!(p.validate(&g).is_err());

        let mut m = uniform_behavioral(&g, 0);
        let first = *m.dists.keys().next().unwrap();
        m.dists.get_mut(&first).unwrap()[0].1 = Rational::new(2.into(), 3.into());
        let p = StrategyProfile::new(vec![
            Strategy::Behavioral(m),
            Strategy::Behavioral(uniform_behavioral(&g, 1)),
        ]);
        assert!(p.validate(&g).is_err());
    }
}

//! Exact outcome distributions.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use super::strategy::{BehavioralStrategy, DeterministicStrategy, Strategy, StrategyProfile};
use super::tree::{GameTree, NodeId, NodeKind};
use super::GameError;
use crate::Rational;

/// A rational distribution over terminal histories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeDistribution {
    probs: BTreeMap<NodeId, Rational>,
}

impl OutcomeDistribution {
    pub fn prob(&self, t: NodeId) -> Rational {
        self.probs.get(&t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &Rational)> {
        self.probs.iter().map(|(&t, p)| (t, p))
    }

    pub fn support(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.probs.iter().filter(|(_, p)| !p.is_zero()).map(|(&t, _)| t)
    }

    pub fn total(&self) -> Rational {
        self.probs.values().sum()
    }

    /// Exact L1 distance to another distribution over the same tree.
    pub fn l1(&self, other: &OutcomeDistribution) -> Rational {
        let keys: std::collections::BTreeSet<NodeId> =
            self.probs.keys().chain(other.probs.keys()).copied().collect();
        keys.into_iter().map(|t| (self.prob(t) - other.prob(t)).abs()).sum()
    }
}

enum Form<'a> {
    Det(&'a DeterministicStrategy),
    Beh(&'a BehavioralStrategy),
}

fn walk(
    g: &GameTree,
    node: NodeId,
    weight: Rational,
    forms: &[Form<'_>],
    out: &mut BTreeMap<NodeId, Rational>,
) {
    if weight.is_zero() {
        return;
    }
    match &g.node(node).kind {
        NodeKind::Terminal { .. } => {
            *out.entry(node).or_insert_with(Rational::zero) += weight;
        }
        NodeKind::Decision { player, infoset, .. } => match &forms[*player] {
            Form::Det(s) => {
                let a = s.choices[infoset];
                walk(g, g.child(node, a).unwrap(), weight, forms, out);
            }
            Form::Beh(b) => {
                for (a, p) in &b.dists[infoset] {
                    if !p.is_zero() {
                        walk(g, g.child(node, *a).unwrap(), weight.clone() * p, forms, out);
                    }
                }
            }
        },
    }
}

/// The distribution over terminal histories induced by a profile. Mixed
/// strategies are expanded atom by atom; behavioral strategies multiply
/// edge-wise along the walk.
pub fn outcome_distribution(
    g: &GameTree,
    profile: &StrategyProfile,
) -> Result<OutcomeDistribution, GameError> {
    profile.validate(g)?;
    let mut probs = BTreeMap::new();
    // Cartesian expansion over the mixed players' atoms.
    let mut combos: Vec<(Rational, Vec<Form<'_>>)> = vec![(Rational::one(), Vec::new())];
    for s in &profile.strategies {
        let mut next = Vec::new();
        for (w, forms) in combos {
            match s {
                Strategy::Pure(d) => {
                    let mut f = forms;
                    f.push(Form::Det(d));
                    next.push((w, f));
                }
                Strategy::Behavioral(b) => {
                    let mut f = forms;
                    f.push(Form::Beh(b));
                    next.push((w, f));
                }
                Strategy::Mixed(m) => {
                    for (aw, atom) in &m.atoms {
                        let mut f: Vec<Form<'_>> = forms
                            .iter()
                            .map(|x| match x {
                                Form::Det(d) => Form::Det(d),
                                Form::Beh(b) => Form::Beh(b),
                            })
                            .collect();
                        f.push(Form::Det(atom));
                        next.push((w.clone() * aw, f));
                    }
                }
            }
        }
        combos = next;
    }
    for (w, forms) in &combos {
        walk(g, g.root(), w.clone(), forms, &mut probs);
    }
    Ok(OutcomeDistribution { probs })
}

pub fn expected_utility(
    g: &GameTree,
    profile: &StrategyProfile,
    player: usize,
) -> Result<Rational, GameError> {
    let dist = outcome_distribution(g, profile)?;
    Ok(dist.iter().map(|(t, p)| p * g.utility(t, player)).sum())
}

/// Distribution over terminals conditioned on passing through (or landing
/// in) `reach`. Errors if the event has probability zero.
pub fn conditional_outcome_distribution(
    g: &GameTree,
    profile: &StrategyProfile,
    reach: &[NodeId],
) -> Result<OutcomeDistribution, GameError> {
    let dist = outcome_distribution(g, profile)?;
    let hits: BTreeMap<NodeId, Rational> = dist
        .iter()
        .filter(|&(t, _)| reach.iter().any(|&r| g.is_prefix(r, t)))
        .map(|(t, p)| (t, p.clone()))
        .collect();
    let mass: Rational = hits.values().sum();
    if mass.is_zero() {
        return Err(GameError::UnreachableCondition);
    }
    Ok(OutcomeDistribution {
        probs: hits.into_iter().map(|(t, p)| (t, p / mass.clone())).collect(),
    })
}

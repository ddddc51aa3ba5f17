//! Mixed-to-behavioral conversion for players with perfect recall.

use std::collections::BTreeMap;

use num::Zero;

use super::recall::{experience, player_has_perfect_recall};
use super::strategy::{validate_mixed, BehavioralStrategy, MixedStrategy, Strategy};
use super::tree::{GameTree, InfoSetId};
use super::GameError;
use crate::Rational;

/// Realization-equivalent behavioral strategy for a mixed one: at each
/// information set, the conditional probability of each action among the
/// atoms whose own past play reaches the set. Requires perfect recall for
/// the owner, which makes "reaches" well defined per set rather than per
/// member. At sets the owner's own play never reaches the conditional is
/// arbitrary; we put the uniform distribution there.
pub fn behavioral_from_mixed(
    g: &GameTree,
    m: &MixedStrategy,
) -> Result<BehavioralStrategy, GameError> {
    validate_mixed(g, m)?;
    if !player_has_perfect_recall(g, m.player) {
        return Err(GameError::ImperfectRecall);
    }
    let mut dists = BTreeMap::new();
    for i in g.infosets_of(m.player) {
        let exp = experience(g, g.infoset(i).members[0], m.player);
        let reaching: Vec<_> = m
            .atoms
            .iter()
            .filter(|(_, d)| exp.iter().all(|&(cell, act)| d.choices[&cell] == act))
            .collect();
        let total: Rational = reaching.iter().map(|(w, _)| w.clone()).sum();
        let actions = &g.infoset(i).actions;
        let dist = if total.is_zero() {
            let u = Rational::new(1.into(), (actions.len() as i64).into());
            actions.iter().map(|&a| (a, u.clone())).collect()
        } else {
            actions
                .iter()
                .map(|&a| {
                    let w: Rational = reaching
                        .iter()
                        .filter(|(_, d)| d.choices[&i] == a)
                        .map(|(w, _)| w.clone())
                        .sum();
                    (a, w / total.clone())
                })
                .collect()
        };
        dists.insert(i, dist);
    }
    Ok(BehavioralStrategy { player: m.player, dists })
}

/// Any strategy as a behavioral one. Pure strategies become point masses;
/// mixed ones go through [`behavioral_from_mixed`].
pub fn to_behavioral(g: &GameTree, s: &Strategy) -> Result<BehavioralStrategy, GameError> {
    match s {
        Strategy::Behavioral(b) => Ok(b.clone()),
        Strategy::Pure(d) => Ok(point_mass(g, d)),
        Strategy::Mixed(m) => behavioral_from_mixed(g, m),
    }
}

/// Point-mass behavioral form of a pure strategy, available even without
/// perfect recall.
pub fn point_mass(
    g: &GameTree,
    d: &super::strategy::DeterministicStrategy,
) -> BehavioralStrategy {
    let mut dists: BTreeMap<InfoSetId, Vec<_>> = BTreeMap::new();
    for i in g.infosets_of(d.player) {
        let pick = d.choices[&i];
        let dist = g
            .infoset(i)
            .actions
            .iter()
            .map(|&a| (a, if a == pick { num::One::one() } else { Rational::zero() }))
            .collect();
        dists.insert(i, dist);
    }
    BehavioralStrategy { player: d.player, dists }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::dist::outcome_distribution;
    use crate::game::samples;
    use crate::game::strategy::{uniform_behavioral, DeterministicStrategy, StrategyProfile};
    use num::One;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pure(g: &GameTree, picks: &[(&str, &str)]) -> DeterministicStrategy {
        DeterministicStrategy::from_labels(g, 0, picks)
    }

    #[test]
    fn conversion_is_realization_equivalent() {
        let g = samples::two_stage_recall();
        let m = MixedStrategy {
            player: 0,
            atoms: vec![
                (q(1, 6), pure(&g, &[("first", "L"), ("afterL", "q"), ("afterR", "s")])),
                (q(1, 3), pure(&g, &[("first", "L"), ("afterL", "p"), ("afterR", "t")])),
                (q(1, 2), pure(&g, &[("first", "R"), ("afterL", "p"), ("afterR", "s")])),
            ],
        };
        let b = behavioral_from_mixed(&g, &m).unwrap();
        let first = g.infoset_by_label("first").unwrap();
        let after_l = g.infoset_by_label("afterL").unwrap();
        assert_eq!(b.prob(first, g.action_by_label("L").unwrap()), q(1, 2));
        assert_eq!(b.prob(after_l, g.action_by_label("q").unwrap()), q(1, 3));

        let opp = Strategy::Behavioral(uniform_behavioral(&g, 1));
        let via_mixed = outcome_distribution(
            &g,
            &StrategyProfile::new(vec![Strategy::Mixed(m), opp.clone()]),
        )
        .unwrap();
        let via_beh = outcome_distribution(
            &g,
            &StrategyProfile::new(vec![Strategy::Behavioral(b), opp]),
        )
        .unwrap();
        assert_eq!(via_mixed, via_beh);
    }

    #[test]
    fn own_unreachable_sets_get_uniform() {
        let g = samples::two_stage_recall();
        let m = MixedStrategy {
            player: 0,
            atoms: vec![(Rational::one(), pure(&g, &[("first", "L"), ("afterL", "q"), ("afterR", "s")]))],
        };
        let b = behavioral_from_mixed(&g, &m).unwrap();
        let after_r = g.infoset_by_label("afterR").unwrap();
        assert_eq!(b.prob(after_r, g.action_by_label("s").unwrap()), q(1, 2));
        assert_eq!(b.prob(after_r, g.action_by_label("t").unwrap()), q(1, 2));
    }

    #[test]
    fn imperfect_recall_is_rejected() {
        let g = samples::forgetful();
        let m = MixedStrategy {
            player: 0,
            atoms: vec![(
                Rational::one(),
                DeterministicStrategy::from_labels(&g, 0, &[("pick", "f"), ("forgot", "m")]),
            )],
        };
        assert!(matches!(behavioral_from_mixed(&g, &m), Err(GameError::ImperfectRecall)));
    }
}

//! Certificates of sequential rationality: a completely mixed profile
//! sequence approaching a target, each step carrying a bound on how much any
//! player could gain by deviating at any single information set onward.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use super::kuhn::to_behavioral;
use super::ne::dp_choose;
use super::recall::has_perfect_recall;
use super::strategy::{
    mix_behavioral, uniform_behavioral, validate_behavioral, BehavioralStrategy, StrategyProfile,
};
use super::tree::{ActionId, GameTree, InfoSetId, NodeId, NodeKind};
use super::GameError;
use crate::Rational;

#[derive(Debug, Clone)]
pub struct CertStep {
    /// Completely mixed behavioral profile, one strategy per player.
    pub profile: Vec<BehavioralStrategy>,
    /// Claimed bound on every conditional deviation gain at this step.
    pub delta: Rational,
}

/// A finite prefix of a certifying sequence for a target profile.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub steps: Vec<CertStep>,
}

#[derive(Debug, Clone)]
pub struct SeqStepReport {
    pub step: usize,
    /// Largest conditional improvement any player gets by deviating from
    /// this step's profile at one of their information sets onward.
    pub max_conditional_gain: Rational,
    pub delta: Rational,
    /// Largest per-cell action-probability gap between this step's profile
    /// and the target.
    pub distance_to_target: Rational,
}

#[derive(Debug, Clone)]
pub struct SeqCertReport {
    pub steps: Vec<SeqStepReport>,
}

impl SeqCertReport {
    /// Every step's measured slack within its claimed delta, with deltas and
    /// distances to the target both nonincreasing along the sequence.
    pub fn is_valid(&self) -> bool {
        self.steps.iter().all(|s| s.max_conditional_gain <= s.delta)
            && self.steps.windows(2).all(|w| {
                w[1].delta <= w[0].delta
                    && w[1].distance_to_target <= w[0].distance_to_target
            })
    }

    pub fn final_delta(&self) -> &Rational {
        &self.steps.last().expect("reports cover at least one step").delta
    }

    pub fn final_distance(&self) -> &Rational {
        &self.steps.last().expect("reports cover at least one step").distance_to_target
    }
}

/// Reach probability of every node under a full behavioral profile.
fn full_reach(g: &GameTree, prof: &[BehavioralStrategy]) -> Vec<Rational> {
    let mut r = vec![Rational::zero(); g.num_nodes()];
    r[g.root().0] = Rational::one();
    for id in g.node_ids() {
        if let NodeKind::Decision { player, infoset, children } = &g.node(id).kind {
            for &(a, child) in children {
                r[child.0] = r[id.0].clone() * prof[*player].prob(*infoset, a);
            }
        }
    }
    r
}

/// Continuation value of every node for every player when everyone follows
/// the profile.
fn profile_values(g: &GameTree, prof: &[BehavioralStrategy]) -> Vec<Vec<Rational>> {
    let mut v: Vec<Vec<Rational>> = vec![Vec::new(); g.num_nodes()];
    for id in (0..g.num_nodes()).rev() {
        let row = match &g.node(NodeId(id)).kind {
            NodeKind::Terminal { utilities } => utilities.clone(),
            NodeKind::Decision { player, infoset, children } => {
                let mut acc = vec![Rational::zero(); g.num_players()];
                for &(a, child) in children {
                    let p = prof[*player].prob(*infoset, a);
                    if p.is_zero() {
                        continue;
                    }
                    for (q, val) in v[child.0].iter().enumerate() {
                        acc[q] += p.clone() * val;
                    }
                }
                acc
            }
        };
        v[id] = row;
    }
    v
}

/// Continuation value of every node for `player` when they play `choices`
/// from here on and everyone else follows the profile.
fn optimal_values(
    g: &GameTree,
    prof: &[BehavioralStrategy],
    player: usize,
    choices: &BTreeMap<InfoSetId, ActionId>,
) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); g.num_nodes()];
    for id in (0..g.num_nodes()).rev() {
        let val = match &g.node(NodeId(id)).kind {
            NodeKind::Terminal { utilities } => utilities[player].clone(),
            NodeKind::Decision { player: mover, infoset, children } => {
                if *mover == player {
                    let a = choices[infoset];
                    let child = children.iter().find(|&&(b, _)| b == a).unwrap().1;
                    v[child.0].clone()
                } else {
                    children
                        .iter()
                        .map(|&(a, child)| prof[*mover].prob(*infoset, a) * &v[child.0])
                        .sum()
                }
            }
        };
        v[id] = val;
    }
    v
}

/// Largest conditional deviation gain over all players and information
/// sets. The profile must be completely mixed, which makes every set
/// reachable and, with perfect recall, lets one dynamic program per player
/// give the conditionally optimal continuation everywhere at once.
fn max_conditional_gain(g: &GameTree, prof: &[BehavioralStrategy]) -> Rational {
    let r = full_reach(g, prof);
    let vs = profile_values(g, prof);
    let mut worst = Rational::zero();
    for p in 0..g.num_players() {
        let opp: Vec<Option<BehavioralStrategy>> = (0..g.num_players())
            .map(|q| if q == p { None } else { Some(prof[q].clone()) })
            .collect();
        let choices = dp_choose(g, &opp, p);
        let vstar = optimal_values(g, prof, p, &choices);
        for i in g.infosets_of(p) {
            let members = &g.infoset(i).members;
            let mu: Rational = members.iter().map(|h| r[h.0].clone()).sum();
            let cur: Rational = members.iter().map(|h| r[h.0].clone() * &vs[h.0][p]).sum();
            let best: Rational = members.iter().map(|h| r[h.0].clone() * &vstar[h.0]).sum();
            let gain = (best - cur) / mu;
            if gain > worst {
                worst = gain;
            }
        }
    }
    worst
}

fn profile_distance(
    g: &GameTree,
    a: &[BehavioralStrategy],
    b: &[BehavioralStrategy],
) -> Rational {
    let mut worst = Rational::zero();
    for p in 0..g.num_players() {
        for i in g.infosets_of(p) {
            for &act in &g.infoset(i).actions {
                let gap = (a[p].prob(i, act) - b[p].prob(i, act)).abs();
                if gap > worst {
                    worst = gap;
                }
            }
        }
    }
    worst
}

fn behavioralize(g: &GameTree, target: &StrategyProfile) -> Result<Vec<BehavioralStrategy>, GameError> {
    (0..g.num_players()).map(|p| to_behavioral(g, target.get(p))).collect()
}

/// Measure a certificate against its target. Structural defects (wrong
/// shapes, steps that are not completely mixed) error out; the report's
/// [`SeqCertReport::is_valid`] covers the semantic conditions.
pub fn check_sequential_certificate(
    g: &GameTree,
    target: &StrategyProfile,
    cert: &Certificate,
) -> Result<SeqCertReport, GameError> {
    target.validate(g)?;
    if !has_perfect_recall(g) {
        return Err(GameError::ImperfectRecall);
    }
    if cert.steps.is_empty() {
        return Err(GameError::BadCertificate { step: 0, what: "certificate has no steps".into() });
    }
    let target_beh = behavioralize(g, target)?;
    let mut out = Vec::new();
    for (k, step) in cert.steps.iter().enumerate() {
        if step.profile.len() != g.num_players() {
            return Err(GameError::BadCertificate {
                step: k,
                what: format!(
                    "{} strategies for {} players",
                    step.profile.len(),
                    g.num_players()
                ),
            });
        }
        for (p, b) in step.profile.iter().enumerate() {
            if b.player != p {
                return Err(GameError::BadCertificate {
                    step: k,
                    what: format!("slot {p} holds a strategy for player {}", b.player),
                });
            }
            validate_behavioral(g, b)
                .map_err(|e| GameError::BadCertificate { step: k, what: e.to_string() })?;
            for i in g.infosets_of(p) {
                for &a in &g.infoset(i).actions {
                    if b.prob(i, a) <= Rational::zero() {
                        return Err(GameError::BadCertificate {
                            step: k,
                            what: format!(
                                "profile not completely mixed: {} at {} has zero probability",
                                g.action_label(a),
                                g.infoset(i).label
                            ),
                        });
                    }
                }
            }
        }
        if step.delta < Rational::zero() {
            return Err(GameError::BadCertificate { step: k, what: "negative delta".into() });
        }
        out.push(SeqStepReport {
            step: k,
            max_conditional_gain: max_conditional_gain(g, &step.profile),
            delta: step.delta.clone(),
            distance_to_target: profile_distance(g, &step.profile, &target_beh),
        });
    }
    Ok(SeqCertReport { steps: out })
}

/// The canonical certificate attempt: step k mixes the target with the
/// uniform profile at weight 1/k, and each claimed delta is the suffix
/// maximum of the measured slacks, which keeps the deltas nonincreasing
/// while still covering every step. For targets that are sequentially
/// rational the final delta shrinks like 1/steps; for ones resting on an
/// off-path empty threat it stays bounded away from zero.
pub fn default_certificate(
    g: &GameTree,
    target: &StrategyProfile,
    steps: usize,
) -> Result<Certificate, GameError> {
    assert!(steps >= 1, "a certificate needs at least one step");
    target.validate(g)?;
    if !has_perfect_recall(g) {
        return Err(GameError::ImperfectRecall);
    }
    let target_beh = behavioralize(g, target)?;
    let mut profiles = Vec::new();
    let mut deltas = Vec::new();
    for k in 1..=steps {
        let w = Rational::new(1.into(), (k as i64).into());
        let prof: Vec<BehavioralStrategy> = (0..g.num_players())
            .map(|p| mix_behavioral(g, &target_beh[p], &uniform_behavioral(g, p), &w))
            .collect();
        deltas.push(max_conditional_gain(g, &prof));
        profiles.push(prof);
    }
    for k in (0..steps.saturating_sub(1)).rev() {
        if deltas[k] < deltas[k + 1] {
            deltas[k] = deltas[k + 1].clone();
        }
    }
    Ok(Certificate {
        steps: profiles
            .into_iter()
            .zip(deltas)
            .map(|(profile, delta)| CertStep { profile, delta })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::samples;
    use crate::game::strategy::{uniform_profile, DeterministicStrategy, Strategy};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn entry_profile(g: &GameTree, door: &str, response: &str) -> StrategyProfile {
        StrategyProfile::new(vec![
            Strategy::Pure(DeterministicStrategy::from_labels(g, 0, &[("door", door)])),
            Strategy::Pure(DeterministicStrategy::from_labels(g, 1, &[("response", response)])),
        ])
    }

    #[test]
    fn credible_profile_certifies_with_vanishing_delta() {
        let g = samples::entry_game();
        let target = entry_profile(&g, "in", "yield");
        let cert = default_certificate(&g, &target, 8).unwrap();
        let rep = check_sequential_certificate(&g, &target, &cert).unwrap();
        assert!(rep.is_valid());
        assert_eq!(rep.final_delta(), &q(1, 8));
        assert_eq!(rep.steps[0].max_conditional_gain, q(1, 1));
    }

    #[test]
    fn empty_threat_keeps_delta_large() {
        let g = samples::entry_game();
        let target = entry_profile(&g, "out", "fight");
        let cert = default_certificate(&g, &target, 8).unwrap();
        let rep = check_sequential_certificate(&g, &target, &cert).unwrap();
        assert!(rep.is_valid());
        assert_eq!(rep.final_delta(), &q(15, 8));
        assert!(rep.final_delta() > &q(1, 1));
    }

    #[test]
    fn uniform_target_is_its_own_certificate() {
        let g = samples::matching_bits();
        let target = uniform_profile(&g);
        let cert = default_certificate(&g, &target, 4).unwrap();
        let rep = check_sequential_certificate(&g, &target, &cert).unwrap();
        assert!(rep.is_valid());
        assert_eq!(rep.final_delta(), &q(0, 1));
        assert_eq!(rep.final_distance(), &q(0, 1));
    }

    #[test]
    fn point_mass_steps_are_rejected() {
        let g = samples::entry_game();
        let target = entry_profile(&g, "in", "yield");
        let prof = (0..2).map(|p| crate::game::kuhn::point_mass(&g, &match target.get(p) {
            Strategy::Pure(d) => d.clone(),
            _ => unreachable!(),
        })).collect();
        let cert = Certificate { steps: vec![CertStep { profile: prof, delta: q(0, 1) }] };
        assert!(matches!(
            check_sequential_certificate(&g, &target, &cert),
            Err(GameError::BadCertificate { .. })
        ));
    }

    #[test]
    fn understated_delta_invalidates() {
        let g = samples::entry_game();
        let target = entry_profile(&g, "in", "yield");
        let prof: Vec<_> = (0..2).map(|p| uniform_behavioral(&g, p)).collect();
        let cert = Certificate { steps: vec![CertStep { profile: prof, delta: q(1, 2) }] };
        let rep = check_sequential_certificate(&g, &target, &cert).unwrap();
        assert!(!rep.is_valid());
        assert_eq!(rep.steps[0].max_conditional_gain, q(1, 1));
    }
}

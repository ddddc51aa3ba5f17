//! Exact finite extensive-form games.
//!
//! Histories are sequences of interned actions, utilities are rationals, and
//! every operation in this module is exact: no floating point enters until
//! the Monte-Carlo layers.

mod dist;
mod kuhn;
mod ne;
mod normal_form;
mod recall;
pub mod samples;
mod seqcert;
mod strategy;
mod tree;

pub use dist::{conditional_outcome_distribution, expected_utility, outcome_distribution, OutcomeDistribution};
pub use kuhn::behavioral_from_mixed;
pub use ne::{best_response, check_epsilon_ne, NeReport, PlayerGain};
pub use normal_form::{embed_normal_form, EmbeddedGame, NormalFormGame};
pub use recall::{experience, has_perfect_recall};
pub use seqcert::{check_sequential_certificate, default_certificate, CertStep, Certificate, SeqCertReport, SeqStepReport};
pub use strategy::{
    enumerate_pure_strategies, uniform_behavioral, uniform_profile, BehavioralStrategy,
    DeterministicStrategy, MixedStrategy, Strategy, StrategyProfile,
};
pub use tree::{
    ActionId, GameTree, GameViolation, InfoSet, InfoSetId, Node, NodeId, NodeKind, RawGame,
    RawNode, ValidationReport,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("game failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error("strategy malformed for this game: {0}")]
    BadStrategy(String),
    #[error("operation requires perfect recall")]
    ImperfectRecall,
    #[error("conditioning event has probability zero")]
    UnreachableCondition,
    #[error("certificate step {step}: {what}")]
    BadCertificate { step: usize, what: String },
    #[error("{0}")]
    Unsupported(String),
}

//! Finite extensive-form games, a query-budgeted ideal-permutation commitment
//! scheme, and machinery for checking that a family of "computational" games
//! played by budgeted machines represents an underlying finite game.
//!
//! The crate is organised bottom-up:
//!
//! * [`bits`], [`tape`], [`seeding`]: bitstrings, explicit randomness tapes,
//!   and the published seed-derivation chain.
//! * [`game`]: exact (rational-valued) extensive-form games, strategies,
//!   outcome distributions, equilibrium checks.
//! * [`crypto`]: the lazily sampled ideal permutation, query budgets, and the
//!   bit-commitment scheme built on it.
//! * [`machine`]: computational game families, machine strategies, and the
//!   game runner.
//! * [`represent`]: history maps and strategy lifts tying a family to an
//!   underlying game, plus the structural/utility/outcome verifiers.
//! * [`indist`]: distinguishers, advantage estimation, view ensembles, and
//!   machine-consistent information partitions.
//! * [`equilibria`]: computational Nash and sequential-equilibrium checks
//!   against deviation batteries.
//! * [`experiments`]: the concrete constructions (commitment game, its
//!   coordination variant, the variable-key-length separation, the
//!   correlated-equilibrium compiler) and their experiment drivers.

pub mod bits;
pub mod csvfmt;
pub mod seeding;
pub mod stats;
pub mod tape;

pub mod crypto;
pub mod game;

pub mod machine;
pub mod represent;

pub mod equilibria;
pub mod indist;

pub mod experiments;

pub use num::BigRational as Rational;

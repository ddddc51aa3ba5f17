//! Computational games: families of bitstring games, machine strategies with
//! explicit randomness and budgets, and the runner tying them together.

mod empirical;
mod family;
mod runner;

pub use empirical::{
    empirical_psi, empirical_utilities, stream_trial_seed, EmpiricalDistribution, PsiEstimate,
};
pub use family::{count_histories, enumerate_histories, GameFamily, View};
pub use runner::{
    run_game, run_game_full, Activation, ForfeitReason, Machine, MachineKind, Outcome, Transcript,
};

#[cfg(test)]
#[allow(unused_imports)]
pub(crate) use family::testgames as test_families;

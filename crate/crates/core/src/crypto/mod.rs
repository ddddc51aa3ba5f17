//! Query-budgeted ideal-permutation cryptography.
//!
//! [`PermTable`] is a lazily sampled random permutation per bit width; the
//! raw forward/inverse interface is verifier-side infrastructure. Bounded
//! parties (machine strategies, distinguishers, attackers) interact with it
//! only through a budgeted [`Oracle`], which exposes forward queries and the
//! scheme algorithms [`commit`]/[`reveal`] but never the raw inverse. That
//! restriction is what stands in for one-wayness: with inverse access a
//! single query would open any commitment, and the hiding bound
//! [`hiding_advantage_bound`] would be vacuous.

mod commit;
mod perm;

pub use commit::{commit, commit_string, committed_bit, hiding_advantage_bound, reveal, Commitment, Reveal};
pub use perm::{Oracle, PermTable, QueryMeter};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CryptoError {
    #[error("permutation query budget exhausted")]
    BudgetExceeded,
    #[error("commitment width {0} out of range (need 2..=64)")]
    BadWidth(u8),
    #[error("expected a {expected}-bit string, got {got} bits")]
    BadLength { expected: usize, got: usize },
}

//! Hybrid quantum-classical solver for loan-collection action selection.
//!
//! The pipeline divides the loanee association graph into small groups,
//! optimizes each group with a constraint-preserving QAOA simulated exactly
//! in the one-hot subspace, stitches the group solutions back together
//! through their shared edge nodes, and finally trades objective for lower
//! total provision with a greedy single-switch search.
//!
//! Conventions used across the crate: loanees are 0-based indices in the
//! library API and 1-based ids in every file format; actions are 1-based
//! everywhere, with action 1 the discounted-payoff (DPO) action.

pub mod datagen;
pub mod error;
pub mod gpr;
pub mod model;
pub mod oracle;
pub mod partition;
pub mod pipeline;
pub mod qaoa;
pub mod reconstruct;
pub mod rng;

pub use error::{Error, Result};
pub use model::{ActionAssignment, AssocGraph, BitString, ProblemInstance};

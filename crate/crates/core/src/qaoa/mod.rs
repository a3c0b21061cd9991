//! Constraint-preserving QAOA simulated exactly in the one-hot subspace.
//!
//! A group of `N'` loanees with `M` actions each would need `N' * M` qubits,
//! but the XY-ring mixer conserves the single excitation of every loanee, so
//! the reachable states are exactly the `M^N'` one-hot configurations. The
//! simulator works on that space directly: the cost Hamiltonian is a
//! diagonal over configurations and the mixer acts as one `M x M` unitary on
//! each loanee's axis.
//!
//! Configuration indices are mixed-radix in base `M` with the group's first
//! (smallest-id) member as the most significant digit; digit `k` holds the
//! action of member `k` minus one.

mod hamiltonian;
mod optimize;
mod simulate;

pub use hamiltonian::{build_hamiltonians, mixer_block, GroupHamiltonians, MIXER_COUPLING};
pub use optimize::{optimize, QaoaConfig, QaoaOutcome, RestartRecord};
pub use simulate::{energy, evolve, initial_state, mixer_propagator, SubspaceState};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order of the two layers inside one driving cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleOrder {
    /// `U_A(gamma) U_B(beta) |psi>`: mixer applied first.
    #[default]
    MixerFirst,
    /// `U_B(beta) U_A(gamma) |psi>`: cost phase applied first.
    CostFirst,
}

/// Variational angles `(gamma_1, beta_1, ..., gamma_T, beta_T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    theta: Vec<f64>,
}

impl QaoaParams {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() || !theta.len().is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "theta must have even, non-zero length, got {}",
                theta.len()
            )));
        }
        Ok(Self { theta })
    }

    pub fn zeros(cycles: usize) -> Self {
        Self {
            theta: vec![0.0; 2 * cycles],
        }
    }

    pub fn cycles(&self) -> usize {
        self.theta.len() / 2
    }

    pub fn gamma(&self, cycle: usize) -> f64 {
        self.theta[2 * cycle]
    }

    pub fn beta(&self, cycle: usize) -> f64 {
        self.theta[2 * cycle + 1]
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
}

/// Mixed-radix digits of `index`, most significant first, as 1-based actions.
pub fn config_actions(index: usize, n_members: usize, n_actions: usize) -> Vec<usize> {
    let mut actions = vec![0; n_members];
    let mut rest = index;
    for slot in actions.iter_mut().rev() {
        *slot = rest % n_actions + 1;
        rest /= n_actions;
    }
    actions
}

/// Inverse of [`config_actions`].
pub fn config_index(actions: &[usize], n_actions: usize) -> usize {
    actions.iter().fold(0, |acc, &a| acc * n_actions + (a - 1))
}

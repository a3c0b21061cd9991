use crate::error::{Error, Result};
use crate::model::{ProblemInstance, DPO_ACTION};
use crate::partition::Group;

use super::config_actions;

/// XY coupling strength `J`.
pub const MIXER_COUPLING: f64 = 1.0;

/// Cost diagonal and single-loanee mixer block for one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupHamiltonians {
    members: Vec<usize>,
    n_actions: usize,
    cost_diag: Vec<f64>,
    mixer_block: Vec<f64>,
}

impl GroupHamiltonians {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn n_members(&self) -> usize {
        self.members.len()
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn dim(&self) -> usize {
        self.cost_diag.len()
    }

    /// Eigenvalue of the cost Hamiltonian on each configuration.
    pub fn cost_diag(&self) -> &[f64] {
        &self.cost_diag
    }

    /// Row-major `M x M` restriction of the XY ring to one excitation.
    pub fn mixer_block(&self) -> &[f64] {
        &self.mixer_block
    }
}

/// Single-excitation block of `-(J/2) sum_j (X_j X_{j+1} + Y_{j+1} Y_j)` on a
/// periodic ring of `M` qubits. Each ring term hops the excitation between
/// neighbours with amplitude `-J`; for `M = 2` the periodic sum visits the
/// one bond twice, giving `-2J`.
pub fn mixer_block(n_actions: usize) -> Vec<f64> {
    let m = n_actions;
    let mut block = vec![0.0; m * m];
    for j in 0..m {
        let k = (j + 1) % m;
        block[j * m + k] -= MIXER_COUPLING;
        block[k * m + j] -= MIXER_COUPLING;
    }
    block
}

/// Builds `H_A` as a diagonal over the group's configurations and the mixer
/// block. Edge nodes contribute their profits and couplings in full.
pub fn build_hamiltonians(
    instance: &ProblemInstance,
    group: &Group,
    epsilon: f64,
) -> Result<GroupHamiltonians> {
    let members = group.members();
    if let Some(&bad) = members.iter().find(|&&v| v >= instance.n_loanees()) {
        return Err(Error::UnknownLoanee(bad));
    }
    let m = instance.n_actions();
    let n = members.len();
    let dim = m
        .checked_pow(n as u32)
        .ok_or_else(|| Error::InvalidConfig(format!("group of {n} loanees is too large")))?;

    // Couplings inside the group, as pairs of member positions.
    let mut couplings = Vec::new();
    for (pa, &a) in members.iter().enumerate() {
        for &(b, w) in instance.assoc().neighbors(a) {
            if b > a {
                if let Ok(pb) = members.binary_search(&b) {
                    couplings.push((pa, pb, w));
                }
            }
        }
    }

    let cost_diag = (0..dim)
        .map(|c| {
            let actions = config_actions(c, n, m);
            let profit: f64 = members
                .iter()
                .zip(&actions)
                .map(|(&i, &a)| instance.profit(i, a))
                .sum();
            let welfare: f64 = couplings
                .iter()
                .filter(|&&(pa, pb, _)| actions[pa] != DPO_ACTION && actions[pb] != DPO_ACTION)
                .map(|c| c.2)
                .sum();
            -(1.0 - epsilon) * profit - epsilon * welfare
        })
        .collect();

    Ok(GroupHamiltonians {
        members,
        n_actions: m,
        cost_diag,
        mixer_block: mixer_block(m),
    })
}

//! Brute-force references for tests and small-instance checks. Nothing in the
//! production pipeline calls into this module.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionAssignment, ProblemInstance, DPO_ACTION};
use crate::partition::Group;
use crate::qaoa::{config_index, CycleOrder, QaoaParams, MIXER_COUPLING};

/// Largest search space [`brute_force_best`] will enumerate.
pub const MAX_ENUMERATION: f64 = 1e7;

/// Largest register [`dense_qaoa_reference`] will build.
pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// 1-based actions of the best assignment.
    pub assignment: Vec<usize>,
    pub objective: f64,
    pub provision: f64,
    pub provision_cap: Option<f64>,
    pub evaluated: u64,
}

/// Exhaustive maximization of the objective, optionally subject to
/// `provision <= cap`. Enumeration runs in ascending mixed-radix order
/// (first loanee most significant), and only a strictly better objective
/// replaces the incumbent, so ties go to the smallest index.
pub fn brute_force_best(instance: &ProblemInstance, cap: Option<f64>) -> Result<OracleResult> {
    let n = instance.n_loanees();
    let m = instance.n_actions();
    let size = (m as f64).powi(n as i32);
    if size > MAX_ENUMERATION {
        return Err(Error::SearchSpaceTooLarge {
            size,
            limit: MAX_ENUMERATION,
        });
    }

    let mut actions = vec![1usize; n];
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    let mut evaluated = 0u64;
    loop {
        evaluated += 1;
        let prov: f64 = actions
            .iter()
            .enumerate()
            .map(|(i, &a)| instance.provision_of(i, a))
            .sum();
        if cap.is_none_or(|c| prov <= c) {
            let y = instance.partial_objective(&actions);
            if best.as_ref().is_none_or(|b| y > b.0) {
                best = Some((y, prov, actions.clone()));
            }
        }
        // Odometer increment, last loanee fastest.
        let mut k = n;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            if actions[k] < m {
                actions[k] += 1;
                break;
            }
            actions[k] = 1;
        }
        if actions.iter().all(|&a| a == 1) {
            break;
        }
    }

    match best {
        Some((objective, provision, assignment)) => Ok(OracleResult {
            assignment,
            objective,
            provision,
            provision_cap: cap,
            evaluated,
        }),
        None => Err(Error::Infeasible {
            cap: cap.unwrap_or(f64::NAN),
        }),
    }
}

impl OracleResult {
    pub fn to_assignment(&self, n_actions: usize) -> ActionAssignment {
        ActionAssignment::new(self.assignment.clone(), n_actions)
            .expect("oracle assignment is valid")
    }
}

/// Full `2^(N' M)`-dimensional state vector. Qubit `(k, j)` (member `k`,
/// action `j`, both 0-based) is qubit number `q = k M + j`, stored at bit
/// `N' M - 1 - q` of the basis index so the index reads like the
/// loanee-major bit string.
#[derive(Debug, Clone)]
pub struct DenseState {
    pub n_members: usize,
    pub n_actions: usize,
    pub amplitudes: Vec<Complex64>,
}

impl DenseState {
    fn n_qubits(&self) -> usize {
        self.n_members * self.n_actions
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n_qubits() - 1 - q)
    }

    /// Basis index of the one-hot state with the given 1-based actions.
    pub fn one_hot_index(&self, actions: &[usize]) -> usize {
        actions
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &a)| acc | self.bit(k * self.n_actions + a - 1))
    }

    /// Amplitudes on one-hot states, in the subspace simulator's order.
    pub fn one_hot_amplitudes(&self) -> Vec<Complex64> {
        let dim = self.n_actions.pow(self.n_members as u32);
        (0..dim)
            .map(|c| {
                let actions = crate::qaoa::config_actions(c, self.n_members, self.n_actions);
                debug_assert_eq!(config_index(&actions, self.n_actions), c);
                self.amplitudes[self.one_hot_index(&actions)]
            })
            .collect()
    }

    /// Largest `|amplitude|` on any basis state that breaks one-hot.
    pub fn max_off_sector_amplitude(&self) -> f64 {
        let m = self.n_actions;
        let block_mask = (1usize << m) - 1;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(idx, _)| {
                (0..self.n_members).any(|k| {
                    let shift = (self.n_members - 1 - k) * m;
                    (idx >> shift & block_mask).count_ones() != 1
                })
            })
            .map(|(_, a)| a.norm())
            .fold(0.0, f64::max)
    }
}

fn pauli_x(bit: bool) -> (bool, Complex64) {
    (!bit, Complex64::new(1.0, 0.0))
}

fn pauli_y(bit: bool) -> (bool, Complex64) {
    // Y|0> = i|1>, Y|1> = -i|0>
    if bit {
        (false, Complex64::new(0.0, -1.0))
    } else {
        (true, Complex64::new(0.0, 1.0))
    }
}

/// Explicit `H_B = -(J/2) sum_k sum_j (X_{k,j} X_{k,j+1} + Y_{k,j+1} Y_{k,j})`
/// with periodic `j`, assembled from single-qubit Pauli actions.
fn dense_mixer(n_members: usize, m: usize) -> DMatrix<f64> {
    let nq = n_members * m;
    let dim = 1usize << nq;
    let bit = |q: usize| 1usize << (nq - 1 - q);
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..n_members {
        for j in 0..m {
            let (qa, qb) = (k * m + j, k * m + (j + 1) % m);
            for (first, second) in [
                (pauli_x as fn(bool) -> _, pauli_x as fn(bool) -> _),
                (pauli_y, pauli_y),
            ] {
                for s in 0..dim {
                    // Apply the operator on qa, then the one on qb.
                    let (na, ca) = first(s & bit(qa) != 0);
                    let s1 = if na { s | bit(qa) } else { s & !bit(qa) };
                    let (nb, cb) = second(s1 & bit(qb) != 0);
                    let s2 = if nb { s1 | bit(qb) } else { s1 & !bit(qb) };
                    h[(s2, s)] += ca * cb * (-0.5 * MIXER_COUPLING);
                }
            }
        }
    }
    DMatrix::from_fn(dim, dim, |r, c| {
        debug_assert!(h[(r, c)].im.abs() < 1e-12);
        h[(r, c)].re
    })
}

/// Diagonal of `H_A` over every computational basis state, one-hot or not.
fn dense_cost(instance: &ProblemInstance, members: &[usize], epsilon: f64) -> Vec<f64> {
    let m = instance.n_actions();
    let nq = members.len() * m;
    let occupied = |s: usize, k: usize, j: usize| s >> (nq - 1 - (k * m + j)) & 1 == 1;
    (0..1usize << nq)
        .map(|s| {
            let mut profit = 0.0;
            for (k, &i) in members.iter().enumerate() {
                for j in 0..m {
                    if occupied(s, k, j) {
                        profit += instance.profit(i, j + 1);
                    }
                }
            }
            let mut welfare = 0.0;
            for (ka, &a) in members.iter().enumerate() {
                for (kb, &b) in members.iter().enumerate().skip(ka + 1) {
                    if let Some(w) = instance.assoc().weight(a, b) {
                        let na = occupied(s, ka, DPO_ACTION - 1) as u8 as f64;
                        let nb = occupied(s, kb, DPO_ACTION - 1) as u8 as f64;
                        welfare += w * (1.0 - na) * (1.0 - nb);
                    }
                }
            }
            -(1.0 - epsilon) * profit - epsilon * welfare
        })
        .collect()
}

/// Literal QAOA on the full qubit register: explicit `H_A`, `H_B`, exact
/// exponentials through a dense eigendecomposition of `H_B`, starting from
/// the all-DPO basis state.
pub fn dense_qaoa_reference(
    instance: &ProblemInstance,
    group: &Group,
    epsilon: f64,
    params: &QaoaParams,
    order: CycleOrder,
) -> Result<DenseState> {
    let members = group.members();
    if let Some(&bad) = members.iter().find(|&&v| v >= instance.n_loanees()) {
        return Err(Error::UnknownLoanee(bad));
    }
    let m = instance.n_actions();
    let nq = members.len() * m;
    if nq > MAX_DENSE_QUBITS {
        return Err(Error::DenseTooLarge {
            qubits: nq,
            limit: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << nq;
    let cost = dense_cost(instance, &members, epsilon);
    let eig = SymmetricEigen::new(dense_mixer(members.len(), m));

    let mut state = DenseState {
        n_members: members.len(),
        n_actions: m,
        amplitudes: vec![Complex64::new(0.0, 0.0); dim],
    };
    let start = state.one_hot_index(&vec![DPO_ACTION; members.len()]);
    state.amplitudes[start] = Complex64::new(1.0, 0.0);

    let apply_mixer = |psi: &mut Vec<Complex64>, beta: f64| {
        let v = &eig.eigenvectors;
        let coeffs: Vec<Complex64> = (0..dim)
            .map(|k| {
                let overlap: Complex64 = (0..dim).map(|r| psi[r] * v[(r, k)]).sum();
                overlap * Complex64::cis(-beta * eig.eigenvalues[k])
            })
            .collect();
        for (r, out) in psi.iter_mut().enumerate() {
            *out = (0..dim).map(|k| coeffs[k] * v[(r, k)]).sum();
        }
    };
    let apply_cost = |psi: &mut Vec<Complex64>, gamma: f64| {
        for (a, &c) in psi.iter_mut().zip(&cost) {
            *a *= Complex64::cis(-gamma * c);
        }
    };

    for t in 0..params.cycles() {
        match order {
            CycleOrder::MixerFirst => {
                apply_mixer(&mut state.amplitudes, params.beta(t));
                apply_cost(&mut state.amplitudes, params.gamma(t));
            }
            CycleOrder::CostFirst => {
                apply_cost(&mut state.amplitudes, params.gamma(t));
                apply_mixer(&mut state.amplitudes, params.beta(t));
            }
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{objective, AssocGraph};

    fn small(eps: f64) -> ProblemInstance {
        ProblemInstance::new(
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            vec![vec![0.1, 0.2], vec![0.3, 0.4]],
            AssocGraph::new(2, [(0, 1, 2.0)]).unwrap(),
            eps,
            None,
        )
        .unwrap()
    }

    #[test]
    fn uncoupled_optimum_is_rowwise_argmax() {
        let inst = ProblemInstance::new(
            vec![
                vec![0.5, 0.5, 0.1],
                vec![0.1, 0.2, 0.9],
                vec![0.4, 0.3, 0.2],
            ],
            vec![vec![0.0; 3]; 3],
            AssocGraph::new(3, [(0, 1, 1.0)]).unwrap(),
            0.0,
            None,
        )
        .unwrap();
        let r = brute_force_best(&inst, None).unwrap();
        assert_eq!(r.assignment, vec![1, 3, 1]);
        assert_eq!(r.evaluated, 27);
    }

    #[test]
    fn coupled_two_by_two() {
        let r = brute_force_best(&small(0.5), None).unwrap();
        assert_eq!(r.assignment, vec![2, 2]);
        assert!((r.objective - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cap_restricts_and_infeasible_cap_errors() {
        let inst = small(0.5);
        let r = brute_force_best(&inst, Some(0.5)).unwrap();
        assert!(r.provision <= 0.5);
        let check = objective(&inst, &r.to_assignment(2)).unwrap();
        assert_eq!(check, r.objective);
        assert!(matches!(
            brute_force_best(&inst, Some(0.39)),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn guard_on_large_space() {
        let inst = ProblemInstance::new(
            vec![vec![0.0; 5]; 11],
            vec![vec![0.0; 5]; 11],
            AssocGraph::empty(11),
            0.0,
            None,
        )
        .unwrap();
        assert!(matches!(
            brute_force_best(&inst, None),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn dense_zero_angles_is_initial_state() {
        let inst = small(0.5);
        let g = Group::new(vec![0, 1], vec![]).unwrap();
        let s = dense_qaoa_reference(
            &inst,
            &g,
            0.5,
            &QaoaParams::zeros(2),
            CycleOrder::MixerFirst,
        )
        .unwrap();
        // |10 10>
        assert!((s.amplitudes[0b1010] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(s.amplitudes.iter().filter(|a| a.norm() > 1e-12).count(), 1);
    }

    #[test]
    fn dense_two_qubit_closed_form() {
        let inst = ProblemInstance::new(
            vec![vec![0.2, 0.9]],
            vec![vec![0.0; 2]],
            AssocGraph::empty(1),
            0.0,
            None,
        )
        .unwrap();
        let g = Group::new(vec![0], vec![]).unwrap();
        for k in 0..20 {
            let beta = 0.11 * k as f64;
            let p = QaoaParams::new(vec![0.7, beta]).unwrap();
            let s = dense_qaoa_reference(&inst, &g, 0.0, &p, CycleOrder::MixerFirst).unwrap();
            assert!((s.amplitudes[0b01].norm_sqr() - (2.0 * beta).sin().powi(2)).abs() < 1e-12);
            assert!(s.max_off_sector_amplitude() < 1e-12);
        }
    }

    #[test]
    fn dense_guard() {
        let inst = ProblemInstance::new(
            vec![vec![0.0; 5]; 3],
            vec![vec![0.0; 5]; 3],
            AssocGraph::empty(3),
            0.0,
            None,
        )
        .unwrap();
        let g = Group::new(vec![0, 1, 2], vec![]).unwrap();
        assert!(matches!(
            dense_qaoa_reference(
                &inst,
                &g,
                0.0,
                &QaoaParams::zeros(1),
                CycleOrder::MixerFirst
            ),
            Err(Error::DenseTooLarge { qubits: 15, .. })
        ));
    }
}

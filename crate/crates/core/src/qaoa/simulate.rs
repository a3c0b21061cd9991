use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{CycleOrder, GroupHamiltonians, QaoaParams};

/// Amplitudes over the `M^N'` one-hot configurations of a group.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceState {
    n_members: usize,
    n_actions: usize,
    amplitudes: Vec<Complex64>,
}

impl SubspaceState {
    pub fn n_members(&self) -> usize {
        self.n_members
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// `p(x) = |<x|psi>|^2` for every configuration.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }
}

/// Every loanee on the DPO action: amplitude one on configuration 0.
pub fn initial_state(n_members: usize, n_actions: usize) -> SubspaceState {
    let dim = n_actions.pow(n_members as u32);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[0] = Complex64::new(1.0, 0.0);
    SubspaceState {
        n_members,
        n_actions,
        amplitudes,
    }
}

/// `exp(-i beta B)` for a symmetric circulant block `B`, row-major.
///
/// The discrete Fourier modes diagonalize any circulant matrix, with
/// eigenvalues `lambda_k = sum_s c_s cos(2 pi s k / M)` for first row `c`.
pub fn mixer_propagator(block: &[f64], n_actions: usize, beta: f64) -> Vec<Complex64> {
    let m = n_actions;
    debug_assert!((0..m).all(|j| (0..m).all(|k| block[j * m + k] == block[(k + m - j) % m])));
    let eigen: Vec<f64> = (0..m)
        .map(|k| {
            (0..m)
                .map(|s| block[s] * (TAU * (s * k) as f64 / m as f64).cos())
                .sum()
        })
        .collect();
    let phases: Vec<Complex64> = eigen.iter().map(|&l| Complex64::cis(-beta * l)).collect();
    let mut u = vec![Complex64::new(0.0, 0.0); m * m];
    for j in 0..m {
        for jp in 0..m {
            let diff = (j + m - jp) % m;
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, phase) in phases.iter().enumerate() {
                acc += phase * Complex64::cis(TAU * ((diff * k) % m) as f64 / m as f64);
            }
            u[j * m + jp] = acc / m as f64;
        }
    }
    u
}

/// Applies the same `M x M` unitary along every loanee axis.
fn apply_mixer(amplitudes: &mut [Complex64], n_members: usize, m: usize, u: &[Complex64]) {
    let dim = amplitudes.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..n_members {
        let stride = m.pow((n_members - 1 - axis) as u32);
        for outer in (0..dim).step_by(stride * m) {
            for base in outer..outer + stride {
                for (j, slot) in buf.iter_mut().enumerate() {
                    *slot = amplitudes[base + j * stride];
                }
                for j in 0..m {
                    let row = &u[j * m..(j + 1) * m];
                    amplitudes[base + j * stride] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
                }
            }
        }
    }
}

fn apply_phase(amplitudes: &mut [Complex64], cost: &[f64], gamma: f64) {
    for (amp, &c) in amplitudes.iter_mut().zip(cost) {
        *amp *= Complex64::cis(-gamma * c);
    }
}

/// Runs `T` cycles of cost phase `exp(-i gamma_t H_A)` and mixer
/// `exp(-i beta_t H_B)` in the given order.
pub fn evolve(
    state: &SubspaceState,
    hams: &GroupHamiltonians,
    params: &QaoaParams,
    order: CycleOrder,
) -> SubspaceState {
    let m = hams.n_actions();
    assert_eq!(
        state.amplitudes.len(),
        hams.dim(),
        "state and Hamiltonian dimensions differ"
    );
    let mut amplitudes = state.amplitudes.clone();
    for t in 0..params.cycles() {
        let u = mixer_propagator(hams.mixer_block(), m, params.beta(t));
        match order {
            CycleOrder::MixerFirst => {
                apply_mixer(&mut amplitudes, state.n_members, m, &u);
                apply_phase(&mut amplitudes, hams.cost_diag(), params.gamma(t));
            }
            CycleOrder::CostFirst => {
                apply_phase(&mut amplitudes, hams.cost_diag(), params.gamma(t));
                apply_mixer(&mut amplitudes, state.n_members, m, &u);
            }
        }
    }
    SubspaceState {
        amplitudes,
        ..*state
    }
}

/// `<psi| H_A |psi>`.
pub fn energy(state: &SubspaceState, hams: &GroupHamiltonians) -> f64 {
    state
        .amplitudes
        .iter()
        .zip(hams.cost_diag())
        .map(|(a, c)| a.norm_sqr() * c)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AssocGraph, ProblemInstance};
    use crate::partition::Group;
    use crate::qaoa::build_hamiltonians;

    fn instance(h: Vec<Vec<f64>>, edges: &[(usize, usize, f64)], eps: f64) -> ProblemInstance {
        let n = h.len();
        let m = h[0].len();
        ProblemInstance::new(
            h,
            vec![vec![0.0; m]; n],
            AssocGraph::new(n, edges.iter().copied()).unwrap(),
            eps,
            None,
        )
        .unwrap()
    }

    fn group(n: usize) -> Group {
        Group::new((0..n).collect(), vec![]).unwrap()
    }

    #[test]
    fn initial_states() {
        let s = initial_state(1, 2);
        assert_eq!(
            s.amplitudes(),
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        );
        let s = initial_state(2, 2);
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.norm(), 1.0);
    }

    #[test]
    fn zero_angles_leave_state_unchanged() {
        let inst = instance(
            vec![vec![0.2, 0.5, 0.1], vec![0.3, 0.1, 0.6]],
            &[(0, 1, 0.5)],
            0.4,
        );
        let hams = build_hamiltonians(&inst, &group(2), 0.4).unwrap();
        let s0 = initial_state(2, 3);
        let s = evolve(&s0, &hams, &QaoaParams::zeros(3), CycleOrder::MixerFirst);
        for (a, b) in s.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn single_loanee_two_actions_follows_sin_squared() {
        let inst = instance(vec![vec![0.3, 0.8]], &[], 0.0);
        let hams = build_hamiltonians(&inst, &group(1), 0.0).unwrap();
        for k in 0..50 {
            let beta = k as f64 * 0.07;
            let gamma = 1.3 - k as f64 * 0.01;
            let s = evolve(
                &initial_state(1, 2),
                &hams,
                &QaoaParams::new(vec![gamma, beta]).unwrap(),
                CycleOrder::MixerFirst,
            );
            let p = s.probabilities();
            let expected = (2.0 * beta).sin().powi(2);
            assert!((p[1] - expected).abs() < 1e-12);
            let e = (1.0 - expected) * hams.cost_diag()[0] + expected * hams.cost_diag()[1];
            assert!((energy(&s, &hams) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn propagator_is_unitary_and_matches_series() {
        for m in 2..7 {
            let block = crate::qaoa::mixer_block(m);
            let beta = 0.37;
            let u = mixer_propagator(&block, m, beta);
            // Taylor series of exp(-i beta B) as an independent check.
            let mut term: Vec<Complex64> = (0..m * m)
                .map(|k| {
                    if k % (m + 1) == 0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            let mut sum = term.clone();
            for n in 1..60 {
                let mut next = vec![Complex64::new(0.0, 0.0); m * m];
                for r in 0..m {
                    for c in 0..m {
                        for k in 0..m {
                            next[r * m + c] += term[r * m + k] * block[k * m + c];
                        }
                    }
                }
                let scale = Complex64::new(0.0, -beta) / n as f64;
                term = next.into_iter().map(|v| v * scale).collect();
                for (s, t) in sum.iter_mut().zip(&term) {
                    *s += t;
                }
            }
            for (a, b) in u.iter().zip(&sum) {
                assert!((a - b).norm() < 1e-12, "m={m}");
            }
        }
    }

    #[test]
    fn norm_preserved_and_phase_keeps_probabilities() {
        let inst = instance(
            vec![
                vec![0.2, 0.5, 0.1, 0.4],
                vec![0.3, 0.1, 0.6, 0.2],
                vec![0.9, 0.1, 0.0, 0.3],
            ],
            &[(0, 1, 0.5), (1, 2, 0.2)],
            0.5,
        );
        let hams = build_hamiltonians(&inst, &group(3), 0.5).unwrap();
        let mixed = evolve(
            &initial_state(3, 4),
            &hams,
            &QaoaParams::new(vec![0.0, 0.8]).unwrap(),
            CycleOrder::MixerFirst,
        );
        assert!((mixed.norm() - 1.0).abs() < 1e-12);
        let mut phased = mixed.clone();
        apply_phase(&mut phased.amplitudes, hams.cost_diag(), 2.1);
        for (a, b) in mixed.probabilities().iter().zip(phased.probabilities()) {
            assert!((a - b).abs() < 1e-15);
        }
        let long = evolve(
            &initial_state(3, 4),
            &hams,
            &QaoaParams::new(vec![0.3, 0.8, 1.1, -0.4, 2.0, 0.9]).unwrap(),
            CycleOrder::CostFirst,
        );
        assert!((long.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_superposition_energy_is_mean_cost() {
        let inst = instance(
            vec![vec![0.2, 0.5, 0.1], vec![0.3, 0.1, 0.6]],
            &[(0, 1, 0.5)],
            0.4,
        );
        let hams = build_hamiltonians(&inst, &group(2), 0.4).unwrap();
        let amp = Complex64::new(1.0 / 3.0, 0.0);
        let state = SubspaceState {
            n_members: 2,
            n_actions: 3,
            amplitudes: vec![amp; 9],
        };
        let mean = hams.cost_diag().iter().sum::<f64>() / 9.0;
        assert!((energy(&state, &hams) - mean).abs() < 1e-12);
        let init = initial_state(2, 3);
        assert!((energy(&init, &hams) + 0.6 * (0.2 + 0.3)).abs() < 1e-12);
    }
}

use loan_qcbo::datagen::{generate, GenConfig};
use loan_qcbo::model::{objective, ActionAssignment};
use loan_qcbo::oracle::brute_force_best;
use loan_qcbo::pipeline::{random_assignment, solve, sweep, Mode, RunConfig};
use loan_qcbo::rng::derive_seed;

fn quick() -> RunConfig {
    RunConfig {
        nu: 6,
        qaoa_iters: 60,
        restarts: 2,
        ..RunConfig::default()
    }
}

#[test]
fn standalone_zero_budget_keeps_random_objective() {
    let inst = generate(&GenConfig::new(30, 4, 5)).unwrap().instance;
    let cfg = RunConfig {
        mode: Mode::StandaloneGpr,
        gpr_iters: Some(0),
        seed: 11,
        ..quick()
    };
    let manifest = solve(&inst, &cfg).unwrap().manifest;
    let start: ActionAssignment = random_assignment(30, 4, derive_seed(11, "baseline", 0));
    assert_eq!(manifest.objective, objective(&inst, &start).unwrap());
    assert_eq!(manifest.gpr_steps, 0);
}

#[test]
fn hybrid_never_beats_oracle() {
    for seed in 0..5 {
        let inst = generate(&GenConfig::new(6, 3, seed)).unwrap().instance;
        let star = brute_force_best(&inst, None).unwrap().objective;
        let manifest = solve(&inst, &RunConfig { seed, ..quick() })
            .unwrap()
            .manifest;
        assert!(
            manifest.objective <= star + 1e-9,
            "{} > {star}",
            manifest.objective
        );
    }
}

#[test]
fn dpo_count_falls_with_epsilon() {
    let grid = [0.0, 0.45, 0.9];
    let mut counts = vec![Vec::new(); grid.len()];
    for seed in 0..7 {
        let inst = generate(&GenConfig::new(40, 3, seed)).unwrap().instance;
        let cfg = RunConfig {
            nu: 5,
            gpr_iters: Some(0),
            seed,
            ..quick()
        };
        let rows = sweep(&inst, &cfg, &grid).unwrap();
        for (k, row) in rows.iter().filter(|r| r.mode == Mode::Hybrid).enumerate() {
            counts[k].push(row.dpo_count);
        }
    }
    let medians: Vec<usize> = counts
        .iter_mut()
        .map(|c| {
            c.sort();
            c[c.len() / 2]
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[0] >= w[1]), "{medians:?}");
}

#[test]
fn matched_modes_share_instance_and_gpr_budget() {
    let inst = generate(&GenConfig::new(20, 3, 1)).unwrap().instance;
    let cfg = RunConfig {
        nu: 4,
        gpr_iters: Some(7),
        epsilon: Some(0.2),
        ..quick()
    };
    let h = solve(&inst, &cfg).unwrap().manifest;
    let s = solve(
        &inst,
        &RunConfig {
            mode: Mode::StandaloneGpr,
            ..cfg
        },
    )
    .unwrap()
    .manifest;
    assert_eq!((h.epsilon, h.n_loanees), (s.epsilon, s.n_loanees));
    assert!(h.gpr_steps <= 7 && s.gpr_steps <= 7);
}

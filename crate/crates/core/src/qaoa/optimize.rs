use std::cell::RefCell;
use std::f64::consts::TAU;

use cobyla::{minimize, RhoBeg, StopTols};
use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::partition::Group;
use crate::rng::substream;

use super::{build_hamiltonians, energy, evolve, initial_state, CycleOrder, QaoaParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaConfig {
    /// Driving cycles `T`.
    pub cycles: usize,
    /// Objective evaluations allowed per restart.
    pub max_iters: usize,
    pub restarts: usize,
    pub order: CycleOrder,
}

impl Default for QaoaConfig {
    fn default() -> Self {
        Self {
            cycles: 2,
            max_iters: 200,
            restarts: 4,
            order: CycleOrder::MixerFirst,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub initial_theta: Vec<f64>,
    pub initial_energy: f64,
    pub best_theta: Vec<f64>,
    pub best_energy: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct QaoaOutcome {
    pub params: QaoaParams,
    pub energy: f64,
    /// `p(x)` over the group's configurations, mixed-radix order.
    pub distribution: Vec<f64>,
    pub restarts: Vec<RestartRecord>,
}

struct Tracker {
    best_energy: f64,
    best_theta: Vec<f64>,
    evaluations: usize,
}

/// Minimizes `<H_A>` over the angles with COBYLA from `restarts` random
/// starts in `[0, 1)^(2T)` and returns the best angles seen together with
/// the sampling distribution they produce.
pub fn optimize(
    instance: &ProblemInstance,
    group: &Group,
    epsilon: f64,
    config: &QaoaConfig,
    seed: u64,
) -> Result<QaoaOutcome> {
    if config.cycles == 0 || config.max_iters == 0 || config.restarts == 0 {
        return Err(Error::InvalidConfig(
            "cycles, max_iters and restarts must all be at least 1".into(),
        ));
    }
    let hams = build_hamiltonians(instance, group, epsilon)?;
    let start = initial_state(hams.n_members(), hams.n_actions());
    let n_params = 2 * config.cycles;
    let evaluate = |theta: &[f64]| {
        let params = QaoaParams {
            theta: theta.to_vec(),
        };
        energy(&evolve(&start, &hams, &params, config.order), &hams)
    };
    let bounds = vec![(-TAU, TAU); n_params];

    let mut records = Vec::with_capacity(config.restarts);
    for restart in 0..config.restarts {
        let mut rng = substream(seed, "qaoa-init", restart as u64);
        let initial_theta: Vec<f64> = (0..n_params).map(|_| rng.random::<f64>()).collect();
        let initial_energy = evaluate(&initial_theta);
        let tracker = RefCell::new(Tracker {
            best_energy: initial_energy,
            best_theta: initial_theta.clone(),
            evaluations: 1,
        });
        let objective = |theta: &[f64], _: &mut ()| {
            let e = evaluate(theta);
            let mut t = tracker.borrow_mut();
            t.evaluations += 1;
            if e < t.best_energy {
                t.best_energy = e;
                t.best_theta = theta.to_vec();
            }
            e
        };
        let no_constraints: &[fn(&[f64], &mut ()) -> f64] = &[];
        // Failure statuses still leave the best point in the tracker.
        let _ = minimize(
            objective,
            &initial_theta,
            &bounds,
            no_constraints,
            (),
            config.max_iters,
            RhoBeg::All(0.5),
            Some(StopTols {
                ftol_abs: 1e-12,
                ..StopTols::default()
            }),
        );
        let t = tracker.into_inner();
        records.push(RestartRecord {
            initial_theta,
            initial_energy,
            best_theta: t.best_theta,
            best_energy: t.best_energy,
            evaluations: t.evaluations,
        });
    }

    let best = records.iter().fold(&records[0], |b, r| {
        if r.best_energy < b.best_energy {
            r
        } else {
            b
        }
    });
    let params = QaoaParams::new(best.best_theta.clone())?;
    let state = evolve(&start, &hams, &params, config.order);
    Ok(QaoaOutcome {
        energy: best.best_energy,
        distribution: state.probabilities(),
        params,
        restarts: records,
    })
}

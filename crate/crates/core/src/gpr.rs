//! Greedy provision reduction: repeatedly apply the single action switch
//! with the best finesse score until the provision cap is met or no switch
//! improves `(provision, -Y)` lexicographically.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{objective, provision, ActionAssignment, ProblemInstance, DPO_ACTION};

/// Objective changes smaller than this are treated as zero.
pub const OBJECTIVE_TOL: f64 = 1e-12;

/// Step budget used when the caller passes no limit. Termination is
/// guaranteed without it; it only guards against a logic error.
pub const UNBOUNDED_GUARD: usize = 10_000_000;

/// Finesse of a switch with provision reduction `a` and objective reduction
/// `b`; `None` means the switch is blocked.
pub fn finesse(a: f64, b: f64) -> Option<f64> {
    if a < 0.0 || (a == 0.0 && b > 0.0) {
        None
    } else if b <= 0.0 {
        Some(a)
    } else {
        Some(-b / a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GprStep {
    pub loanee: usize,
    pub from: usize,
    pub to: usize,
    pub finesse: f64,
    pub objective: f64,
    pub provision: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    CapReached,
    AllBlocked,
    IterationCap,
    GuardTripped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GprTrace {
    pub initial_objective: f64,
    pub initial_provision: f64,
    pub steps: Vec<GprStep>,
    pub termination: Termination,
}

impl GprTrace {
    /// `step,i,j,j_prime,Y,provision`; row 0 is the starting point and
    /// loanee ids are 1-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,i,j,j_prime,Y,provision\n");
        let _ = writeln!(
            out,
            "0,,,,{},{}",
            self.initial_objective, self.initial_provision
        );
        for (k, s) in self.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                k + 1,
                s.loanee + 1,
                s.from,
                s.to,
                s.objective,
                s.provision
            );
        }
        out
    }

    pub fn final_provision(&self) -> f64 {
        self.steps
            .last()
            .map_or(self.initial_provision, |s| s.provision)
    }

    pub fn final_objective(&self) -> f64 {
        self.steps
            .last()
            .map_or(self.initial_objective, |s| s.objective)
    }
}

/// Objective gain of moving `loanee` to `to`, from its profit row and its
/// couplings only.
fn objective_gain(instance: &ProblemInstance, actions: &[usize], loanee: usize, to: usize) -> f64 {
    let from = actions[loanee];
    let eps = instance.epsilon();
    let mut gain = (1.0 - eps) * (instance.profit(loanee, to) - instance.profit(loanee, from));
    let was_active = from != DPO_ACTION;
    let is_active = to != DPO_ACTION;
    if was_active != is_active {
        let live: f64 = instance
            .assoc()
            .neighbors(loanee)
            .iter()
            .filter(|&&(v, _)| actions[v] != DPO_ACTION)
            .map(|e| e.1)
            .sum();
        gain += if is_active { eps * live } else { -eps * live };
    }
    gain
}

/// Best admissible switch: highest finesse, ties to the smallest loanee and
/// then the smallest target action.
fn best_switch(instance: &ProblemInstance, actions: &[usize]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, &from) in actions.iter().enumerate() {
        for to in 1..=instance.n_actions() {
            if to == from {
                continue;
            }
            let a = instance.provision_of(i, from) - instance.provision_of(i, to);
            let mut b = -objective_gain(instance, actions, i, to);
            if b.abs() <= OBJECTIVE_TOL {
                b = 0.0;
            }
            // Zero-effect switches never improve the lexicographic key.
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let Some(f) = finesse(a, b) else { continue };
            if best.is_none_or(|(_, _, bf)| f > bf) {
                best = Some((i, to, f));
            }
        }
    }
    best
}

/// One greedy step, or `None` when every switch is blocked or ineffective.
pub fn gpr_step(
    instance: &ProblemInstance,
    assignment: &ActionAssignment,
) -> Option<(ActionAssignment, GprStep)> {
    let (i, to, f) = best_switch(instance, assignment.actions())?;
    let next = assignment.with_action(i, to);
    let step = GprStep {
        loanee: i,
        from: assignment.action(i),
        to,
        finesse: f,
        objective: objective(instance, &next).expect("assignment matches instance"),
        provision: provision(instance, &next).expect("assignment matches instance"),
    };
    Some((next, step))
}

/// Runs greedy steps until `provision <= cap` (when a cap is given), no
/// admissible switch remains, or `max_steps` steps were taken.
pub fn run_gpr(
    instance: &ProblemInstance,
    assignment: &ActionAssignment,
    cap: Option<f64>,
    max_steps: Option<usize>,
) -> (ActionAssignment, GprTrace) {
    let mut current = assignment.clone();
    let mut trace = GprTrace {
        initial_objective: objective(instance, &current).expect("assignment matches instance"),
        initial_provision: provision(instance, &current).expect("assignment matches instance"),
        steps: Vec::new(),
        termination: Termination::AllBlocked,
    };
    let limit = max_steps.unwrap_or(UNBOUNDED_GUARD);
    let mut current_provision = trace.initial_provision;
    loop {
        if cap.is_some_and(|c| current_provision <= c) {
            trace.termination = Termination::CapReached;
            break;
        }
        if trace.steps.len() >= limit {
            trace.termination = if max_steps.is_some() {
                Termination::IterationCap
            } else {
                Termination::GuardTripped
            };
            break;
        }
        match gpr_step(instance, &current) {
            Some((next, step)) => {
                current_provision = step.provision;
                trace.steps.push(step);
                current = next;
            }
            None => {
                trace.termination = Termination::AllBlocked;
                break;
            }
        }
    }
    (current, trace)
}

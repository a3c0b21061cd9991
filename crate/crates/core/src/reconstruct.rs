//! Stitches per-group QAOA distributions into one assignment for the whole
//! instance. Groups are folded in one at a time; candidate pairs must agree
//! on every shared loanee, and only the `lambda` best partial solutions
//! survive each merge.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionAssignment, ProblemInstance};
use crate::partition::Group;
use crate::qaoa::config_actions;
use crate::rng::substream;

pub const DEFAULT_LAMBDA: usize = 10;

/// A configuration index of one group and its probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedConfig {
    pub index: usize,
    pub probability: f64,
}

/// Configurations with non-zero probability, most probable first, ties to
/// the smaller index.
fn ranked_support(distribution: &[f64]) -> Vec<RankedConfig> {
    let mut ranked: Vec<RankedConfig> = distribution
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(index, &probability)| RankedConfig { index, probability })
        .collect();
    ranked.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then(a.index.cmp(&b.index))
    });
    ranked
}

/// The `lambda` most probable configurations (fewer if the support is smaller).
pub fn top_candidates(distribution: &[f64], lambda: usize) -> Vec<RankedConfig> {
    let mut ranked = ranked_support(distribution);
    ranked.truncate(lambda);
    ranked
}

/// A partial assignment over a set of loanees with its probability score
/// (product of group probabilities) and the objective of the sub-model
/// induced by those loanees.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    loanees: Vec<usize>,
    actions: Vec<usize>,
    pub probability: f64,
    pub objective: f64,
}

impl Candidate {
    /// `loanees` must be sorted and parallel to `actions`.
    pub fn new(
        instance: &ProblemInstance,
        loanees: Vec<usize>,
        actions: Vec<usize>,
        probability: f64,
    ) -> Self {
        debug_assert!(loanees.windows(2).all(|w| w[0] < w[1]));
        let mut partial = vec![0; instance.n_loanees()];
        for (&i, &a) in loanees.iter().zip(&actions) {
            partial[i] = a;
        }
        Self {
            objective: instance.partial_objective(&partial),
            loanees,
            actions,
            probability,
        }
    }

    pub fn from_config(instance: &ProblemInstance, group: &Group, config: RankedConfig) -> Self {
        let members = group.members();
        let actions = config_actions(config.index, members.len(), instance.n_actions());
        Self::new(instance, members, actions, config.probability)
    }

    pub fn loanees(&self) -> &[usize] {
        &self.loanees
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn action_of(&self, loanee: usize) -> Option<usize> {
        self.loanees
            .binary_search(&loanee)
            .ok()
            .map(|k| self.actions[k])
    }
}

/// Union of two partial assignments, or `None` if they disagree on any
/// shared loanee.
pub fn combine(
    instance: &ProblemInstance,
    left: &Candidate,
    right: &Candidate,
    shared: &[usize],
) -> Option<Candidate> {
    for &v in shared {
        if left.action_of(v) != right.action_of(v) {
            return None;
        }
    }
    let (mut loanees, mut actions) = (Vec::new(), Vec::new());
    let (mut a, mut b) = (0, 0);
    while a < left.loanees.len() || b < right.loanees.len() {
        let take_left = b == right.loanees.len()
            || (a < left.loanees.len() && left.loanees[a] <= right.loanees[b]);
        if take_left {
            if b < right.loanees.len() && left.loanees[a] == right.loanees[b] {
                b += 1;
            }
            loanees.push(left.loanees[a]);
            actions.push(left.actions[a]);
            a += 1;
        } else {
            loanees.push(right.loanees[b]);
            actions.push(right.actions[b]);
            b += 1;
        }
    }
    Some(Candidate::new(
        instance,
        loanees,
        actions,
        left.probability * right.probability,
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructOutcome {
    pub assignment: ActionAssignment,
    pub objective: f64,
    /// Merges where no supported configuration of the incoming group was
    /// compatible and its shared loanees were overwritten.
    pub forced_merges: usize,
    /// Surviving candidates after each merge, starting with the first group.
    pub candidate_counts: Vec<usize>,
}

fn keep_best(candidates: &mut Vec<Candidate>, lambda: usize) {
    candidates.sort_by(|a, b| {
        b.objective
            .total_cmp(&a.objective)
            .then(b.probability.total_cmp(&a.probability))
    });
    candidates.truncate(lambda);
}

/// Folds the groups into one full assignment.
///
/// Groups are merged largest first (ties to the smaller smallest member);
/// `shuffle_seed` replaces that order with a seeded random one.
pub fn reconstruct(
    instance: &ProblemInstance,
    groups: &[Group],
    distributions: &[Vec<f64>],
    lambda: usize,
    shuffle_seed: Option<u64>,
) -> Result<ReconstructOutcome> {
    let n = instance.n_loanees();
    let m = instance.n_actions();
    if lambda == 0 {
        return Err(Error::InvalidConfig("lambda must be at least 1".into()));
    }
    if groups.is_empty() || groups.len() != distributions.len() {
        return Err(Error::InvalidConfig(format!(
            "{} groups but {} distributions",
            groups.len(),
            distributions.len()
        )));
    }
    let mut owners = vec![0usize; n];
    for (g, d) in groups.iter().zip(distributions) {
        if d.len() != m.pow(g.len() as u32) {
            return Err(Error::InvalidConfig(
                "distribution length does not match its group".into(),
            ));
        }
        for &v in g.core() {
            *owners.get_mut(v).ok_or(Error::UnknownLoanee(v))? += 1;
        }
        if let Some(&v) = g.edge_nodes().iter().find(|&&v| v >= n) {
            return Err(Error::UnknownLoanee(v));
        }
    }
    if let Some(v) = owners.iter().position(|&c| c != 1) {
        return Err(Error::InvalidConfig(format!(
            "group cores do not partition the loanees (loanee {} owned {} times)",
            v + 1,
            owners[v]
        )));
    }

    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by_key(|&g| (std::cmp::Reverse(groups[g].len()), groups[g].members()[0]));
    if let Some(seed) = shuffle_seed {
        order.shuffle(&mut substream(seed, "merge-order", 0));
    }

    let first = order[0];
    let mut covered = vec![false; n];
    let mut current: Vec<Candidate> = top_candidates(&distributions[first], lambda)
        .into_iter()
        .map(|c| Candidate::from_config(instance, &groups[first], c))
        .collect();
    if current.is_empty() {
        current.push(Candidate::from_config(
            instance,
            &groups[first],
            RankedConfig {
                index: 0,
                probability: 0.0,
            },
        ));
    }
    keep_best(&mut current, lambda);
    for v in groups[first].members() {
        covered[v] = true;
    }
    let mut candidate_counts = vec![current.len()];
    let mut forced_merges = 0;

    for &g in &order[1..] {
        let group = &groups[g];
        let members = group.members();
        let shared: Vec<usize> = members.iter().copied().filter(|&v| covered[v]).collect();
        let ranked = ranked_support(&distributions[g]);

        let mut merged = Vec::new();
        for rc in ranked.iter().take(lambda) {
            let right = Candidate::from_config(instance, group, *rc);
            merged.extend(
                current
                    .iter()
                    .filter_map(|left| combine(instance, left, &right, &shared)),
            );
        }
        // Walk further down the incoming group's distribution until
        // something fits.
        for rc in ranked.iter().skip(lambda) {
            if !merged.is_empty() {
                break;
            }
            let right = Candidate::from_config(instance, group, *rc);
            merged.extend(
                current
                    .iter()
                    .filter_map(|left| combine(instance, left, &right, &shared)),
            );
        }
        if merged.is_empty() {
            forced_merges += 1;
            let left = &current[0];
            let top = ranked.first().copied().unwrap_or(RankedConfig {
                index: 0,
                probability: 0.0,
            });
            let mut actions = config_actions(top.index, members.len(), m);
            for (slot, &v) in actions.iter_mut().zip(&members) {
                if let Some(a) = left.action_of(v) {
                    *slot = a;
                }
            }
            let right = Candidate::new(instance, members.clone(), actions, top.probability);
            merged.push(
                combine(instance, left, &right, &shared).expect("overwritten shared loanees agree"),
            );
        }
        keep_best(&mut merged, lambda);
        candidate_counts.push(merged.len());
        current = merged;
        for v in members {
            covered[v] = true;
        }
    }

    let best = &current[0];
    debug_assert_eq!(best.loanees.len(), n);
    let assignment = ActionAssignment::new(best.actions.clone(), m)?;
    Ok(ReconstructOutcome {
        objective: best.objective,
        assignment,
        forced_merges,
        candidate_counts,
    })
}

//! Problem data, the objective and provision functionals, and the one-hot
//! bit-string encoding of assignments.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The discounted-payoff action. Taking it on a loanee cuts that loanee out
/// of the association term of the objective.
pub const DPO_ACTION: usize = 1;

/// Weighted undirected association graph over loanees `0..n`.
///
/// Each edge is stored once as `(a, b, w)` with `a < b`; the adjacency lists
/// are sorted by neighbour so lookups from either endpoint agree.
#[derive(Debug, Clone, PartialEq)]
pub struct AssocGraph {
    n_nodes: usize,
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl AssocGraph {
    pub fn new(
        n_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut normalized = Vec::new();
        for (a, b, w) in edges {
            if a >= n_nodes || b >= n_nodes {
                return Err(Error::InvalidInstance(format!(
                    "edge ({a}, {b}) references a loanee outside 0..{n_nodes}"
                )));
            }
            if a == b {
                return Err(Error::InvalidInstance(format!("self-loop on loanee {a}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "edge ({a}, {b}) has non-positive weight {w}"
                )));
            }
            normalized.push((a.min(b), a.max(b), w));
        }
        normalized.sort_by_key(|x| (x.0, x.1));
        if let Some(pair) = normalized
            .windows(2)
            .find(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1))
        {
            return Err(Error::InvalidInstance(format!(
                "duplicate edge ({}, {})",
                pair[0].0, pair[0].1
            )));
        }

        let mut adjacency = vec![Vec::new(); n_nodes];
        for &(a, b, w) in &normalized {
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        Ok(Self {
            n_nodes,
            edges: normalized,
            adjacency,
        })
    }

    pub fn empty(n_nodes: usize) -> Self {
        Self {
            n_nodes,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n_nodes],
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(a, b, weight)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        let list = self.adjacency.get(a)?;
        list.binary_search_by_key(&b, |&(v, _)| v)
            .ok()
            .map(|k| list[k].1)
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n_nodes == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n_nodes as f64
        }
    }
}

/// A full problem: profits `h`, provisions `l`, associations `A`, the
/// trade-off weight `epsilon` and an optional provision cap.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    n_loanees: usize,
    n_actions: usize,
    profit: Vec<f64>,
    provision: Vec<f64>,
    assoc: AssocGraph,
    epsilon: f64,
    provision_cap: Option<f64>,
}

impl ProblemInstance {
    /// `profit` and `provision` are `N` rows of `M` entries, column `j - 1`
    /// holding action `j`.
    pub fn new(
        profit: Vec<Vec<f64>>,
        provision: Vec<Vec<f64>>,
        assoc: AssocGraph,
        epsilon: f64,
        provision_cap: Option<f64>,
    ) -> Result<Self> {
        let n_loanees = profit.len();
        if n_loanees == 0 {
            return Err(Error::InvalidInstance("no loanees".into()));
        }
        let n_actions = profit[0].len();
        if n_actions < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 actions, got {n_actions}"
            )));
        }
        if provision.len() != n_loanees {
            return Err(Error::InvalidInstance(format!(
                "profit has {n_loanees} rows but provision has {}",
                provision.len()
            )));
        }
        for (i, (h_row, l_row)) in profit.iter().zip(&provision).enumerate() {
            if h_row.len() != n_actions || l_row.len() != n_actions {
                return Err(Error::InvalidInstance(format!(
                    "row {} does not have {n_actions} actions",
                    i + 1
                )));
            }
            if h_row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "non-finite profit in row {}",
                    i + 1
                )));
            }
            if l_row.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidInstance(format!(
                    "provision row {} has a negative or non-finite entry",
                    i + 1
                )));
            }
        }
        if assoc.n_nodes() != n_loanees {
            return Err(Error::InvalidInstance(format!(
                "association graph has {} nodes, expected {n_loanees}",
                assoc.n_nodes()
            )));
        }
        check_epsilon(epsilon)?;
        if let Some(cap) = provision_cap {
            if !(cap.is_finite() && cap >= 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "provision cap {cap} is negative"
                )));
            }
        }
        Ok(Self {
            n_loanees,
            n_actions,
            profit: profit.into_iter().flatten().collect(),
            provision: provision.into_iter().flatten().collect(),
            assoc,
            epsilon,
            provision_cap,
        })
    }

    pub fn n_loanees(&self) -> usize {
        self.n_loanees
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn provision_cap(&self) -> Option<f64> {
        self.provision_cap
    }

    pub fn assoc(&self) -> &AssocGraph {
        &self.assoc
    }

    /// `h` for loanee `loanee` (0-based) and action `action` (1-based).
    #[inline]
    pub fn profit(&self, loanee: usize, action: usize) -> f64 {
        self.profit[loanee * self.n_actions + action - 1]
    }

    #[inline]
    pub fn provision_of(&self, loanee: usize, action: usize) -> f64 {
        self.provision[loanee * self.n_actions + action - 1]
    }

    pub fn profit_row(&self, loanee: usize) -> &[f64] {
        &self.profit[loanee * self.n_actions..(loanee + 1) * self.n_actions]
    }

    pub fn provision_row(&self, loanee: usize) -> &[f64] {
        &self.provision[loanee * self.n_actions..(loanee + 1) * self.n_actions]
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            epsilon,
            ..self.clone()
        })
    }

    pub fn with_provision_cap(&self, provision_cap: Option<f64>) -> Self {
        Self {
            provision_cap,
            ..self.clone()
        }
    }

    /// Objective restricted to the loanees present in `partial`
    /// (`partial[i] == 0` marks loanee `i` as not covered). Association
    /// terms count only edges with both endpoints covered.
    pub fn partial_objective(&self, partial: &[usize]) -> f64 {
        debug_assert_eq!(partial.len(), self.n_loanees);
        let mut profit = 0.0;
        for (i, &a) in partial.iter().enumerate() {
            if a != 0 {
                profit += self.profit(i, a);
            }
        }
        let mut welfare = 0.0;
        for &(a, b, w) in self.assoc.edges() {
            let (ja, jb) = (partial[a], partial[b]);
            if ja != 0 && jb != 0 && ja != DPO_ACTION && jb != DPO_ACTION {
                welfare += w;
            }
        }
        (1.0 - self.epsilon) * profit + self.epsilon * welfare
    }

    /// Sum of the smallest provision of every loanee.
    pub fn min_total_provision(&self) -> f64 {
        (0..self.n_loanees)
            .map(|i| {
                self.provision_row(i)
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: InstanceFile = serde_json::from_str(&text)?;
        file.into_instance()
    }

    pub fn to_file(&self, provenance: Option<serde_json::Value>) -> InstanceFile {
        InstanceFile {
            n_loanees: self.n_loanees,
            n_actions: self.n_actions,
            epsilon: self.epsilon,
            provision_cap: self.provision_cap,
            h: Matrix::Rows(
                self.profit
                    .chunks(self.n_actions)
                    .map(<[f64]>::to_vec)
                    .collect(),
            ),
            l: Matrix::Rows(
                self.provision
                    .chunks(self.n_actions)
                    .map(<[f64]>::to_vec)
                    .collect(),
            ),
            assoc: self
                .assoc
                .edges()
                .iter()
                .map(|&(a, b, w)| (a + 1, b + 1, w))
                .collect(),
            provenance,
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::InvalidInstance(format!(
            "epsilon {epsilon} is outside [0, 1)"
        )))
    }
}

/// A matrix in an instance file: a list of rows, or one flat row-major list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Matrix {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl Matrix {
    fn into_rows(self, n_rows: usize, n_cols: usize, name: &str) -> Result<Vec<Vec<f64>>> {
        let rows = match self {
            Matrix::Rows(rows) => rows,
            Matrix::Flat(flat) => {
                if flat.len() != n_rows * n_cols {
                    return Err(Error::InvalidInstance(format!(
                        "{name} has {} entries, expected {}",
                        flat.len(),
                        n_rows * n_cols
                    )));
                }
                flat.chunks(n_cols.max(1)).map(<[f64]>::to_vec).collect()
            }
        };
        if rows.len() != n_rows || rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidInstance(format!(
                "{name} is not {n_rows}x{n_cols}"
            )));
        }
        Ok(rows)
    }
}

/// On-disk JSON form of a [`ProblemInstance`]. Loanee ids in `assoc` are 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n_loanees: usize,
    pub n_actions: usize,
    pub epsilon: f64,
    pub provision_cap: Option<f64>,
    pub h: Matrix,
    pub l: Matrix,
    pub assoc: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<ProblemInstance> {
        let (n, m) = (self.n_loanees, self.n_actions);
        let h = self.h.into_rows(n, m, "h")?;
        let l = self.l.into_rows(n, m, "l")?;
        let mut edges = Vec::with_capacity(self.assoc.len());
        for (a, b, w) in self.assoc {
            if a == 0 || b == 0 {
                return Err(Error::InvalidInstance(
                    "loanee ids in assoc are 1-based".into(),
                ));
            }
            edges.push((a - 1, b - 1, w));
        }
        let graph = AssocGraph::new(n, edges)?;
        ProblemInstance::new(h, l, graph, self.epsilon, self.provision_cap)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One action per loanee, 1-based. One-hot feasibility holds by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionAssignment {
    actions: Vec<usize>,
}

impl ActionAssignment {
    pub fn new(actions: Vec<usize>, n_actions: usize) -> Result<Self> {
        if let Some((loanee, &action)) = actions
            .iter()
            .enumerate()
            .find(|(_, &a)| a == 0 || a > n_actions)
        {
            return Err(Error::ActionOutOfRange {
                loanee,
                action,
                n_actions,
            });
        }
        Ok(Self { actions })
    }

    pub fn uniform(n_loanees: usize, action: usize) -> Self {
        Self {
            actions: vec![action; n_loanees],
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn action(&self, loanee: usize) -> usize {
        self.actions[loanee]
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn with_action(&self, loanee: usize, action: usize) -> Self {
        let mut actions = self.actions.clone();
        actions[loanee] = action;
        Self { actions }
    }

    fn check_against(&self, instance: &ProblemInstance) -> Result<()> {
        if self.actions.len() != instance.n_loanees() {
            return Err(Error::DimensionMismatch {
                expected: instance.n_loanees(),
                found: self.actions.len(),
            });
        }
        if let Some((loanee, &action)) = self
            .actions
            .iter()
            .enumerate()
            .find(|(_, &a)| a > instance.n_actions())
        {
            return Err(Error::ActionOutOfRange {
                loanee,
                action,
                n_actions: instance.n_actions(),
            });
        }
        Ok(())
    }
}

/// Yield: `(1 - eps) * sum h[i][a_i] + eps * sum over edges of A` where the
/// edge term survives only if neither endpoint takes the DPO action.
pub fn objective(instance: &ProblemInstance, assignment: &ActionAssignment) -> Result<f64> {
    assignment.check_against(instance)?;
    Ok(instance.partial_objective(assignment.actions()))
}

pub fn provision(instance: &ProblemInstance, assignment: &ActionAssignment) -> Result<f64> {
    assignment.check_against(instance)?;
    Ok(assignment
        .actions()
        .iter()
        .enumerate()
        .map(|(i, &a)| instance.provision_of(i, a))
        .sum())
}

/// Sum of the selected profits without the `(1 - eps)` weight.
pub fn bank_profit(instance: &ProblemInstance, assignment: &ActionAssignment) -> Result<f64> {
    assignment.check_against(instance)?;
    Ok(assignment
        .actions()
        .iter()
        .enumerate()
        .map(|(i, &a)| instance.profit(i, a))
        .sum())
}

pub fn dpo_count(assignment: &ActionAssignment) -> usize {
    assignment
        .actions()
        .iter()
        .filter(|&&a| a == DPO_ACTION)
        .count()
}

/// Loanee-major, action-minor bit string `x[1,1] x[1,2] .. x[N,M]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString(pub Vec<bool>);

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &bit in &self.0 {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidConfig(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

pub fn encode_bits(assignment: &ActionAssignment, n_actions: usize) -> BitString {
    let mut bits = vec![false; assignment.len() * n_actions];
    for (i, &a) in assignment.actions().iter().enumerate() {
        bits[i * n_actions + a - 1] = true;
    }
    BitString(bits)
}

pub fn decode_bits(
    bits: &BitString,
    n_loanees: usize,
    n_actions: usize,
) -> Result<ActionAssignment> {
    if bits.0.len() != n_loanees * n_actions {
        return Err(Error::DimensionMismatch {
            expected: n_loanees * n_actions,
            found: bits.0.len(),
        });
    }
    let mut actions = Vec::with_capacity(n_loanees);
    for (loanee, block) in bits.0.chunks(n_actions).enumerate() {
        let mut set = block.iter().enumerate().filter(|(_, &b)| b);
        match (set.next(), set.next()) {
            (Some((j, _)), None) => actions.push(j + 1),
            _ => return Err(Error::NotOneHot { loanee }),
        }
    }
    Ok(ActionAssignment { actions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_by_two(epsilon: f64, edge: Option<f64>) -> ProblemInstance {
        let graph = AssocGraph::new(2, edge.map(|w| (0, 1, w))).unwrap();
        ProblemInstance::new(
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            vec![vec![0.1, 0.2], vec![0.3, 0.4]],
            graph,
            epsilon,
            None,
        )
        .unwrap()
    }

    fn assign(actions: &[usize]) -> ActionAssignment {
        ActionAssignment::new(actions.to_vec(), 4).unwrap()
    }

    #[test]
    fn objective_examples() {
        let plain = two_by_two(0.0, None);
        assert_eq!(objective(&plain, &assign(&[2, 2])).unwrap(), 6.0);

        let coupled = two_by_two(0.5, Some(2.0));
        assert!((objective(&coupled, &assign(&[2, 1])).unwrap() - 2.5).abs() < 1e-15);
        assert!((objective(&coupled, &assign(&[2, 2])).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn objective_rejects_wrong_length() {
        let inst = two_by_two(0.0, None);
        assert!(matches!(
            objective(&inst, &assign(&[1, 1, 1])),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
        assert!(matches!(
            provision(&inst, &assign(&[1])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            objective(&inst, &assign(&[1, 3])),
            Err(Error::ActionOutOfRange {
                loanee: 1,
                action: 3,
                ..
            })
        ));
    }

    #[test]
    fn provision_examples() {
        let inst = two_by_two(0.0, None);
        assert!((provision(&inst, &assign(&[1, 1])).unwrap() - 0.4).abs() < 1e-15);
        assert!((provision(&inst, &assign(&[2, 2])).unwrap() - 0.6).abs() < 1e-15);

        let zeros = ProblemInstance::new(
            vec![vec![1.0, 2.0]; 3],
            vec![vec![0.0, 0.0]; 3],
            AssocGraph::empty(3),
            0.0,
            None,
        )
        .unwrap();
        assert_eq!(
            provision(&zeros, &ActionAssignment::new(vec![2, 1, 2], 2).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn dpo_count_examples() {
        assert_eq!(dpo_count(&assign(&[1, 1, 1])), 3);
        assert_eq!(dpo_count(&assign(&[2, 3, 4])), 0);
        assert_eq!(dpo_count(&assign(&[1, 2, 1])), 2);
    }

    #[test]
    fn bit_examples() {
        let bits = encode_bits(&assign(&[2, 1]), 2);
        assert_eq!(bits.to_string(), "0110");
        let back = decode_bits(&"0110".parse().unwrap(), 2, 2).unwrap();
        assert_eq!(back.actions(), &[2, 1]);
        assert!(matches!(
            decode_bits(&"1100".parse().unwrap(), 2, 2),
            Err(Error::NotOneHot { loanee: 0 })
        ));
        assert!(matches!(
            decode_bits(&"0010".parse().unwrap(), 2, 2),
            Err(Error::NotOneHot { loanee: 0 })
        ));
    }

    #[test]
    fn encode_decode_round_trips_exhaustively() {
        for n in 1..=4usize {
            for m in 2..=4usize {
                for code in 0..m.pow(n as u32) {
                    let mut rest = code;
                    let actions: Vec<usize> = (0..n)
                        .map(|_| {
                            let a = rest % m + 1;
                            rest /= m;
                            a
                        })
                        .collect();
                    let a = ActionAssignment::new(actions, m).unwrap();
                    assert_eq!(decode_bits(&encode_bits(&a, m), n, m).unwrap(), a);
                }
            }
        }
    }

    #[test]
    fn instance_validation() {
        let bad_l = ProblemInstance::new(
            vec![vec![1.0, 2.0]],
            vec![vec![-0.1, 0.2]],
            AssocGraph::empty(1),
            0.0,
            None,
        );
        assert!(bad_l.is_err());
        assert!(AssocGraph::new(2, [(1, 1, 1.0)]).is_err());
        assert!(AssocGraph::new(2, [(0, 1, 0.0)]).is_err());
        assert!(AssocGraph::new(2, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(two_by_two(0.0, None).with_epsilon(1.0).is_err());
    }

    #[test]
    fn assoc_symmetric_lookup() {
        let g = AssocGraph::new(3, [(2, 0, 0.5), (1, 2, 0.25)]).unwrap();
        assert_eq!(g.weight(0, 2), Some(0.5));
        assert_eq!(g.weight(2, 0), Some(0.5));
        assert_eq!(g.weight(0, 1), None);
        assert_eq!(g.edges(), &[(0, 2, 0.5), (1, 2, 0.25)]);
    }

    #[test]
    fn instance_file_round_trip() {
        let inst = two_by_two(0.5, Some(2.0)).with_provision_cap(Some(0.5));
        let json = inst.to_file(None).to_json().unwrap();
        let back: InstanceFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_instance().unwrap(), inst);

        let flat = r#"{"n_loanees":2,"n_actions":2,"epsilon":0.5,"provision_cap":null,
            "h":[1,2,3,4],"l":[0.1,0.2,0.3,0.4],"assoc":[[1,2,2.0]]}"#;
        let parsed: InstanceFile = serde_json::from_str(flat).unwrap();
        assert_eq!(parsed.into_instance().unwrap(), two_by_two(0.5, Some(2.0)));
    }

    fn arb_instance() -> impl Strategy<Value = (ProblemInstance, Vec<usize>)> {
        (2usize..6, 2usize..5, 0.0f64..0.99).prop_flat_map(|(n, m, eps)| {
            let h = proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, m), n);
            let l = proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, m), n);
            let edges = proptest::collection::vec((0..n, 0..n, 0.01f64..1.0), 0..8);
            let actions = proptest::collection::vec(1..=m, n);
            (h, l, edges, actions).prop_map(move |(h, l, edges, actions)| {
                let mut seen = std::collections::BTreeSet::new();
                let edges: Vec<_> = edges
                    .into_iter()
                    .filter(|&(a, b, _)| a != b && seen.insert((a.min(b), a.max(b))))
                    .collect();
                let g = AssocGraph::new(n, edges).unwrap();
                (ProblemInstance::new(h, l, g, eps, None).unwrap(), actions)
            })
        })
    }

    proptest! {
        #[test]
        fn provision_changes_by_row_difference((inst, actions) in arb_instance(), pick in 0usize..100, to in 0usize..100) {
            let m = inst.n_actions();
            let a = ActionAssignment::new(actions, m).unwrap();
            let i = pick % inst.n_loanees();
            let j_new = to % m + 1;
            let moved = a.with_action(i, j_new);
            let expected = inst.provision_of(i, j_new) - inst.provision_of(i, a.action(i));
            let got = provision(&inst, &moved).unwrap() - provision(&inst, &a).unwrap();
            prop_assert!((got - expected).abs() < 1e-12);
        }

        #[test]
        fn non_dpo_relabeling_is_invariant((inst, actions) in arb_instance()) {
            // Reverse the non-DPO columns of h and relabel actions accordingly.
            let m = inst.n_actions();
            let relabel = |j: usize| if j == 1 { 1 } else { m + 2 - j };
            let h: Vec<Vec<f64>> = (0..inst.n_loanees())
                .map(|i| (1..=m).map(|j| inst.profit(i, relabel(j))).collect())
                .collect();
            let l: Vec<Vec<f64>> = (0..inst.n_loanees()).map(|i| inst.provision_row(i).to_vec()).collect();
            let permuted = ProblemInstance::new(h, l, inst.assoc().clone(), inst.epsilon(), None).unwrap();
            let a = ActionAssignment::new(actions.clone(), m).unwrap();
            let b = ActionAssignment::new(actions.iter().map(|&j| relabel(j)).collect(), m).unwrap();
            prop_assert!((objective(&inst, &a).unwrap() - objective(&permuted, &b).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn rowwise_argmax_is_optimal_without_coupling((inst, actions) in arb_instance()) {
            let inst = inst.with_epsilon(0.0).unwrap();
            let m = inst.n_actions();
            let best: Vec<usize> = (0..inst.n_loanees())
                .map(|i| {
                    let row = inst.profit_row(i);
                    (0..m).fold(0, |b, j| if row[j] > row[b] { j } else { b }) + 1
                })
                .collect();
            let best = ActionAssignment::new(best, m).unwrap();
            let any = ActionAssignment::new(actions, m).unwrap();
            prop_assert!(objective(&inst, &best).unwrap() >= objective(&inst, &any).unwrap());
        }
    }
}

//! Recursive division of the association graph into groups of at most `nu`
//! loanees.
//!
//! The full graph is first split by Clauset-Newman-Moore greedy modularity
//! agglomeration. Each community is then split again by Louvain, every
//! piece is augmented with its edge nodes (outside loanees adjacent to it),
//! and pieces that are still too large are divided recursively.
//!
//! Edge weights are used as modularity weights. Ties between equal gains go
//! to the lexicographically smallest node-id pair, so division is fully
//! determined by the graph and the seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::AssocGraph;
use crate::rng::{derive_seed, substream};

/// Minimum modularity gain for a merge or a move to count as an improvement.
const MODULARITY_TOL: f64 = 1e-12;

/// A subproblem: the loanees it owns (`core`) plus the outside loanees it
/// borrows for their couplings (`edge_nodes`). Both lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    core: Vec<usize>,
    edge_nodes: Vec<usize>,
}

impl Group {
    pub fn new(mut core: Vec<usize>, mut edge_nodes: Vec<usize>) -> Result<Self> {
        core.sort_unstable();
        core.dedup();
        edge_nodes.sort_unstable();
        edge_nodes.dedup();
        if core.is_empty() {
            return Err(Error::InvalidConfig("group core is empty".into()));
        }
        if let Some(&v) = edge_nodes.iter().find(|v| core.binary_search(v).is_ok()) {
            return Err(Error::InvalidConfig(format!(
                "loanee {v} is both core and edge node"
            )));
        }
        Ok(Self { core, edge_nodes })
    }

    pub fn core(&self) -> &[usize] {
        &self.core
    }

    pub fn edge_nodes(&self) -> &[usize] {
        &self.edge_nodes
    }

    /// Core and edge nodes together, sorted ascending. This is the order of
    /// the digits in the group's configuration index.
    pub fn members(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.core.iter().chain(&self.edge_nodes).copied().collect();
        all.sort_unstable();
        all
    }

    pub fn len(&self) -> usize {
        self.core.len() + self.edge_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.core.is_empty()
    }

    pub fn contains(&self, loanee: usize) -> bool {
        self.core.binary_search(&loanee).is_ok() || self.edge_nodes.binary_search(&loanee).is_ok()
    }
}

/// Induced subgraph with local indices `0..nodes.len()`; `nodes` is sorted,
/// so local order agrees with global id order.
struct SubGraph {
    nodes: Vec<usize>,
    adj: Vec<Vec<(usize, f64)>>,
    total_weight: f64,
}

impl SubGraph {
    fn induced(graph: &AssocGraph, nodes: &[usize]) -> Self {
        let mut nodes = nodes.to_vec();
        nodes.sort_unstable();
        let mut adj = vec![Vec::new(); nodes.len()];
        let mut total_weight = 0.0;
        for (a_local, &a) in nodes.iter().enumerate() {
            for &(b, w) in graph.neighbors(a) {
                if let Ok(b_local) = nodes.binary_search(&b) {
                    adj[a_local].push((b_local, w));
                    if a < b {
                        total_weight += w;
                    }
                }
            }
        }
        Self {
            nodes,
            adj,
            total_weight,
        }
    }

    fn full(graph: &AssocGraph) -> Self {
        let all: Vec<usize> = (0..graph.n_nodes()).collect();
        Self::induced(graph, &all)
    }

    fn to_global(&self, mut communities: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        for c in &mut communities {
            for v in c.iter_mut() {
                *v = self.nodes[*v];
            }
            c.sort_unstable();
        }
        communities.sort_by_key(|c| c[0]);
        communities
    }
}

/// Modularity of a partition under edge weights. Zero for an edgeless graph.
pub fn modularity(graph: &AssocGraph, communities: &[Vec<usize>]) -> f64 {
    let m: f64 = graph.edges().iter().map(|e| e.2).sum();
    if m == 0.0 {
        return 0.0;
    }
    let mut label = vec![usize::MAX; graph.n_nodes()];
    for (c, members) in communities.iter().enumerate() {
        for &v in members {
            label[v] = c;
        }
    }
    let mut inner = vec![0.0; communities.len()];
    let mut degree = vec![0.0; communities.len()];
    for &(a, b, w) in graph.edges() {
        if label[a] == label[b] {
            inner[label[a]] += w;
        }
        degree[label[a]] += w;
        degree[label[b]] += w;
    }
    inner
        .iter()
        .zip(&degree)
        .map(|(&i, &k)| i / m - (k / (2.0 * m)).powi(2))
        .sum()
}

/// Clauset-Newman-Moore agglomeration: repeatedly merge the adjacent pair of
/// communities with the largest positive modularity gain.
pub fn greedy_modularity(graph: &AssocGraph) -> Vec<Vec<usize>> {
    let sub = SubGraph::full(graph);
    sub.to_global(cnm_local(&sub))
}

fn cnm_local(sub: &SubGraph) -> Vec<Vec<usize>> {
    let n = sub.nodes.len();
    let m = sub.total_weight;
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    if m == 0.0 {
        return members;
    }
    let mut alive = vec![true; n];
    let mut degree: Vec<f64> = sub
        .adj
        .iter()
        .map(|l| l.iter().map(|e| e.1).sum())
        .collect();
    // Community labels are their smallest local node, which orders them by
    // smallest global id as well.
    let mut links: Vec<BTreeMap<usize, f64>> = sub
        .adj
        .iter()
        .map(|l| l.iter().map(|&(v, w)| (v, w)).collect())
        .collect();

    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for c in (0..n).filter(|&c| alive[c]) {
            for (&d, &w) in links[c].range(c + 1..) {
                let gain = w / m - degree[c] * degree[d] / (2.0 * m * m);
                if best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, c, d));
                }
            }
        }
        let Some((gain, keep, gone)) = best else {
            break;
        };
        if gain <= MODULARITY_TOL {
            break;
        }
        alive[gone] = false;
        let moved = std::mem::take(&mut members[gone]);
        members[keep].extend(moved);
        degree[keep] += degree[gone];
        let gone_links = std::mem::take(&mut links[gone]);
        links[keep].remove(&gone);
        for (other, w) in gone_links {
            if other == keep {
                continue;
            }
            links[other].remove(&gone);
            *links[other].entry(keep).or_insert(0.0) += w;
            *links[keep].entry(other).or_insert(0.0) += w;
        }
    }
    (0..n)
        .filter(|&c| alive[c])
        .map(|c| std::mem::take(&mut members[c]))
        .collect()
}

/// Louvain community detection: local moves then aggregation, repeated until
/// a level makes no improving move. The node sweep order comes from `seed`.
pub fn louvain(graph: &AssocGraph, seed: u64) -> Vec<Vec<usize>> {
    let sub = SubGraph::full(graph);
    sub.to_global(louvain_local(&sub, seed))
}

struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_weight: Vec<f64>,
    members: Vec<Vec<usize>>,
}

fn louvain_local(sub: &SubGraph, seed: u64) -> Vec<Vec<usize>> {
    let n = sub.nodes.len();
    let mut level = Level {
        adj: sub.adj.clone(),
        self_weight: vec![0.0; n],
        members: (0..n).map(|v| vec![v]).collect(),
    };
    if sub.total_weight == 0.0 {
        return level.members;
    }
    let two_m = 2.0 * sub.total_weight;

    for depth in 0u64.. {
        let size = level.adj.len();
        let k: Vec<f64> = (0..size)
            .map(|v| level.adj[v].iter().map(|e| e.1).sum::<f64>() + 2.0 * level.self_weight[v])
            .collect();
        let mut community: Vec<usize> = (0..size).collect();
        let mut total = k.clone();
        let mut order: Vec<usize> = (0..size).collect();
        order.shuffle(&mut substream(seed, "louvain-order", depth));

        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &v in &order {
                let current = community[v];
                let mut to_comm: BTreeMap<usize, f64> = BTreeMap::new();
                for &(u, w) in &level.adj[v] {
                    *to_comm.entry(community[u]).or_insert(0.0) += w;
                }
                total[current] -= k[v];
                let gain = |c: usize, w: f64| w - total[c] * k[v] / two_m;
                let stay = gain(current, to_comm.get(&current).copied().unwrap_or(0.0));
                let mut target = current;
                let mut target_gain = f64::NEG_INFINITY;
                for (&c, &w) in &to_comm {
                    if c != current && gain(c, w) > target_gain {
                        target_gain = gain(c, w);
                        target = c;
                    }
                }
                // Modularity change of the move is 2 (target - stay) / 2m.
                if target == current || 2.0 * (target_gain - stay) / two_m <= MODULARITY_TOL {
                    target = current;
                }
                total[target] += k[v];
                if target != current {
                    community[v] = target;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
            moved_any = true;
        }
        if !moved_any {
            break;
        }
        level = aggregate(&level, &community);
    }
    level.members
}

fn aggregate(level: &Level, community: &[usize]) -> Level {
    let mut relabel = vec![usize::MAX; level.adj.len()];
    let mut next = 0;
    for &c in community {
        if relabel[c] == usize::MAX {
            relabel[c] = next;
            next += 1;
        }
    }
    let mut members = vec![Vec::new(); next];
    let mut self_weight = vec![0.0; next];
    let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); next];
    for v in 0..level.adj.len() {
        let cv = relabel[community[v]];
        members[cv].extend_from_slice(&level.members[v]);
        self_weight[cv] += level.self_weight[v];
        for &(u, w) in &level.adj[v] {
            let cu = relabel[community[u]];
            if cu == cv {
                // Each internal edge is seen from both ends.
                self_weight[cv] += 0.5 * w;
            } else {
                *links[cv].entry(cu).or_insert(0.0) += w;
            }
        }
    }
    Level {
        adj: links.into_iter().map(|l| l.into_iter().collect()).collect(),
        self_weight,
        members,
    }
}

/// Outside loanees adjacent to `core`, in the order the augmentation loop
/// discovers them, each with its total weight into `core`.
fn edge_node_candidates(core: &[usize], graph: &AssocGraph) -> Vec<(usize, f64)> {
    let mut found: Vec<(usize, f64)> = Vec::new();
    for &i in core {
        for &(j, w) in graph.neighbors(i) {
            if core.binary_search(&j).is_ok() {
                continue;
            }
            match found.iter_mut().find(|e| e.0 == j) {
                Some(entry) => entry.1 += w,
                None => found.push((j, w)),
            }
        }
    }
    found
}

/// Adds every outside loanee adjacent to the group's core.
pub fn add_edge_nodes(group: &Group, graph: &AssocGraph) -> Group {
    let found = edge_node_candidates(&group.core, graph);
    let mut edge_nodes: Vec<usize> = group.edge_nodes.clone();
    edge_nodes.extend(found.into_iter().map(|e| e.0));
    edge_nodes.sort_unstable();
    edge_nodes.dedup();
    Group {
        core: group.core.clone(),
        edge_nodes,
    }
}

/// Augmentation limited to the `limit` edge nodes with the strongest
/// coupling to the core (ties to the smaller id).
fn add_edge_nodes_capped(core: &[usize], graph: &AssocGraph, limit: usize) -> Group {
    let mut found = edge_node_candidates(core, graph);
    found.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    found.truncate(limit);
    let mut edge_nodes: Vec<usize> = found.into_iter().map(|e| e.0).collect();
    edge_nodes.sort_unstable();
    Group {
        core: core.to_vec(),
        edge_nodes,
    }
}

/// Splits the association graph into groups of at most `nu` members whose
/// cores partition the loanees.
///
/// When Louvain cannot split an oversized piece any further, its core is cut
/// into sorted runs of at most `nu - 1` loanees and each run keeps only its
/// strongest edge nodes, so the recursion always terminates.
pub fn divide(graph: &AssocGraph, nu: usize, seed: u64) -> Result<Vec<Group>> {
    if nu < 2 {
        return Err(Error::InvalidConfig(format!(
            "nu must be at least 2, got {nu}"
        )));
    }
    let mut groups = Vec::new();
    for community in greedy_modularity(graph) {
        divide_recursive(graph, &community, nu, seed, &mut groups);
    }
    Ok(groups)
}

fn divide_recursive(
    graph: &AssocGraph,
    core: &[usize],
    nu: usize,
    seed: u64,
    out: &mut Vec<Group>,
) {
    let sub = SubGraph::induced(graph, core);
    let branch_seed = derive_seed(seed, "division", core[0] as u64);
    let parts = sub.to_global(louvain_local(&sub, branch_seed));

    if parts.len() == 1 {
        let group = add_edge_nodes_capped(core, graph, usize::MAX);
        if group.len() <= nu {
            out.push(group);
        } else {
            for chunk in core.chunks(nu - 1) {
                out.push(add_edge_nodes_capped(chunk, graph, nu - chunk.len()));
            }
        }
        return;
    }
    for part in parts {
        let group = add_edge_nodes_capped(&part, graph, usize::MAX);
        if group.len() <= nu {
            out.push(group);
        } else {
            divide_recursive(graph, &part, nu, seed, out);
        }
    }
}

/// JSON report of a division, with 1-based loanee ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub nu: usize,
    pub groups: Vec<GroupReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub core: Vec<usize>,
    pub edge_nodes: Vec<usize>,
}

impl PartitionReport {
    pub fn new(nu: usize, groups: &[Group]) -> Self {
        let one_based = |v: &[usize]| v.iter().map(|x| x + 1).collect();
        Self {
            nu,
            groups: groups
                .iter()
                .map(|g| GroupReport {
                    core: one_based(g.core()),
                    edge_nodes: one_based(g.edge_nodes()),
                })
                .collect(),
        }
    }
}

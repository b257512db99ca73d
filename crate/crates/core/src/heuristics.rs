//! Admissible cost-to-go tables.
//!
//! `SUP` (shortest unconstrained path) is one reverse Dijkstra sweep from the
//! goal over edge costs, ignoring battery, fuel and noise. It is the exact
//! unconstrained distance and therefore a lower bound on the constrained
//! optimum. `SLD` is the straight-line distance to the goal, admissible when
//! every edge costs at least its Euclidean length. `ZERO` is the baseline.
//!
//! Nodes that cannot reach the goal get `f64::INFINITY`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Adjacency, EdgeId, Instance, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeuristicKind {
    Sld,
    Sup,
    Zero,
}

impl HeuristicKind {
    pub const ALL: [HeuristicKind; 3] =
        [HeuristicKind::Sld, HeuristicKind::Sup, HeuristicKind::Zero];

    pub fn as_str(self) -> &'static str {
        match self {
            HeuristicKind::Sld => "sld",
            HeuristicKind::Sup => "sup",
            HeuristicKind::Zero => "zero",
        }
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HeuristicKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sld" => Ok(HeuristicKind::Sld),
            "sup" => Ok(HeuristicKind::Sup),
            "zero" => Ok(HeuristicKind::Zero),
            other => Err(format!(
                "unknown heuristic `{other}` (expected sld, sup or zero)"
            )),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum HeuristicError {
    #[error("goal is unreachable from start")]
    Unreachable,
    #[error("straight-line distance needs coordinates of one dimension for every node")]
    MissingCoordinates,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeuristicTable {
    pub kind: HeuristicKind,
    pub h: Vec<f64>,
    /// `false` when admissibility could not be established (SLD on an
    /// instance with an edge shorter than its endpoints' distance).
    pub admissible: bool,
}

impl HeuristicTable {
    pub fn build(kind: HeuristicKind, inst: &Instance) -> Result<HeuristicTable, HeuristicError> {
        match kind {
            HeuristicKind::Sld => sld_table(inst),
            HeuristicKind::Sup => Ok(sup_table(inst)),
            HeuristicKind::Zero => Ok(zero_table(inst)),
        }
    }

    pub fn get(&self, node: NodeId) -> f64 {
        self.h[node]
    }
}

pub fn zero_table(inst: &Instance) -> HeuristicTable {
    HeuristicTable {
        kind: HeuristicKind::Zero,
        h: vec![0.0; inst.num_nodes()],
        admissible: true,
    }
}

pub fn sld_table(inst: &Instance) -> Result<HeuristicTable, HeuristicError> {
    let with_z = inst.nodes.iter().filter(|c| c.z.is_some()).count();
    if inst.goal >= inst.num_nodes() || (with_z != 0 && with_z != inst.num_nodes()) {
        return Err(HeuristicError::MissingCoordinates);
    }
    let goal = inst.nodes[inst.goal];
    let mut h: Vec<f64> = inst.nodes.iter().map(|c| c.distance(&goal)).collect();
    h[inst.goal] = 0.0;
    let admissible = inst
        .edges
        .iter()
        .all(|e| e.cost >= inst.nodes[e.from].distance(&inst.nodes[e.to]));
    if !admissible {
        log::warn!("edge costs are below straight-line distances; SLD may overestimate");
    }
    Ok(HeuristicTable {
        kind: HeuristicKind::Sld,
        h,
        admissible,
    })
}

pub fn sup_table(inst: &Instance) -> HeuristicTable {
    HeuristicTable {
        kind: HeuristicKind::Sup,
        h: reverse_sweep(inst).0,
        admissible: true,
    }
}

/// The unconstrained shortest start-goal path.
#[derive(Clone, Debug, PartialEq)]
pub struct SupPath {
    pub path: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    /// Equal to the SUP table value at the start node.
    pub cost: f64,
}

pub fn sup_path(inst: &Instance) -> Result<SupPath, HeuristicError> {
    let (dist, next) = reverse_sweep(inst);
    let cost = dist[inst.start];
    if !cost.is_finite() {
        return Err(HeuristicError::Unreachable);
    }
    let mut path = vec![inst.start];
    let mut edges = Vec::new();
    let mut node = inst.start;
    while node != inst.goal {
        let id = next[node].expect("finite distance implies a successor");
        edges.push(id);
        node = inst.edges[id].to;
        path.push(node);
    }
    Ok(SupPath { path, edges, cost })
}

#[derive(PartialEq)]
struct Entry {
    dist: f64,
    node: NodeId,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distances to the goal and, per node, the first edge of a shortest path.
fn reverse_sweep(inst: &Instance) -> (Vec<f64>, Vec<Option<EdgeId>>) {
    let n = inst.num_nodes();
    let mut dist = vec![f64::INFINITY; n];
    let mut next = vec![None; n];
    if inst.goal >= n {
        return (dist, next);
    }
    let incoming = Adjacency::incoming(inst);
    let mut heap = BinaryHeap::new();
    dist[inst.goal] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        node: inst.goal,
    });
    while let Some(Entry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &id in incoming.of(node) {
            let e = &inst.edges[id];
            let candidate = e.cost + d;
            if candidate < dist[e.from] {
                dist[e.from] = candidate;
                next[e.from] = Some(id);
                heap.push(Entry {
                    dist: candidate,
                    node: e.from,
                });
            }
        }
    }
    (dist, next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::test_support::{edge, instance};
    use crate::instance::NodeCoord;

    fn line() -> Instance {
        instance(
            3,
            vec![edge(0, 1, 1.0, 0, 0, true), edge(1, 2, 2.0, 0, 0, true)],
            0,
            2,
        )
    }

    #[test]
    fn sld_is_euclidean_distance() {
        let mut inst = line();
        inst.nodes[0] = NodeCoord::planar(0.0, 0.0);
        inst.nodes[2] = NodeCoord::planar(3.0, 4.0);
        let t = sld_table(&inst).unwrap();
        assert_eq!(t.h[0], 5.0);
        assert_eq!(t.h[2], 0.0);
        assert!(
            !t.admissible,
            "edge 0->1 is shorter than its chord once nodes move"
        );
    }

    #[test]
    fn sld_rejects_mixed_dimensions() {
        let mut inst = line();
        inst.nodes[1].z = Some(2.0);
        assert_eq!(sld_table(&inst), Err(HeuristicError::MissingCoordinates));
    }

    #[test]
    fn sup_on_line_graph() {
        let t = sup_table(&line());
        assert_eq!(t.h, vec![3.0, 2.0, 0.0]);
        let p = sup_path(&line()).unwrap();
        assert_eq!(p.path, vec![0, 1, 2]);
        assert_eq!(p.cost, 3.0);
        assert_eq!(p.cost, t.h[0]);
    }

    #[test]
    fn unreachable_nodes_get_infinity() {
        let inst = instance(
            4,
            vec![edge(0, 1, 1.0, 0, 0, true), edge(1, 2, 2.0, 0, 0, true)],
            0,
            2,
        );
        let t = sup_table(&inst);
        assert!(t.h[3].is_infinite());
        let cut = instance(3, vec![edge(0, 1, 1.0, 0, 0, true)], 0, 2);
        assert_eq!(sup_path(&cut), Err(HeuristicError::Unreachable));
    }

    #[test]
    fn sup_prefers_cheaper_detour() {
        let inst = instance(
            3,
            vec![
                edge(0, 2, 10.0, 0, 0, true),
                edge(0, 1, 4.0, 0, 0, true),
                edge(1, 2, 4.0, 0, 0, true),
            ],
            0,
            2,
        );
        let p = sup_path(&inst).unwrap();
        assert_eq!(p.path, vec![0, 1, 2]);
        assert_eq!(p.edges, vec![1, 2]);
        assert_eq!(p.cost, 8.0);
    }

    #[test]
    fn kind_parses_case_insensitively() {
        assert_eq!("SUP".parse::<HeuristicKind>(), Ok(HeuristicKind::Sup));
        assert!("manhattan".parse::<HeuristicKind>().is_err());
    }
}

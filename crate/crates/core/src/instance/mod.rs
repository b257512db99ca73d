//! Problem data model.
//!
//! An [`Instance`] is a directed graph whose edges carry a real cost `D`, a
//! battery drain `C`, a generator recharge `Z` (which is also the fuel burned
//! when the generator runs) and a flag saying whether the generator may run.
//! Resources are quantized [`Units`]; costs stay `f64`.

mod io;
mod solution;
mod validate;

pub use io::{InstanceError, LoadReport};
pub use solution::{check_solution, replay, Replay, Solution, SolutionViolation};
pub use validate::Violation;

use serde_json::Value;

use crate::units::{Quantization, Units};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeCoord {
    pub x: f64,
    pub y: f64,
    pub z: Option<f64>,
}

impl NodeCoord {
    pub fn planar(x: f64, y: f64) -> NodeCoord {
        NodeCoord { x, y, z: None }
    }

    pub fn spatial(x: f64, y: f64, z: f64) -> NodeCoord {
        NodeCoord { x, y, z: Some(z) }
    }

    pub fn distance(&self, other: &NodeCoord) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z.unwrap_or(0.0) - other.z.unwrap_or(0.0);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// A directed edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    /// Travel cost `D`, strictly positive.
    pub cost: f64,
    /// Battery drain `C`; zero on gliding edges.
    pub drain: Units,
    /// Generator recharge `Z`, also the fuel burned while the generator runs.
    pub recharge: Units,
    /// `true` when the generator may run on this edge (no noise restriction).
    pub gen_allowed: bool,
    pub gliding: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub nodes: Vec<NodeCoord>,
    pub edges: Vec<Edge>,
    pub start: NodeId,
    pub goal: NodeId,
    pub b0: Units,
    pub bmin: Units,
    pub bmax: Units,
    pub q0: Units,
    /// Battery drain charged when the generator switches from off to on.
    pub startup: Units,
    pub quantization: Quantization,
    /// Free-form provenance (generator spec, seed, calibration).
    pub meta: Option<Value>,
}

impl Instance {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate::validate(self)
    }

    /// Fraction of node pairs joined by an edge whose generator is forbidden,
    /// counting each unordered pair once.
    pub fn noise_fraction(&self) -> f64 {
        let mut pairs = std::collections::HashMap::new();
        for e in &self.edges {
            let key = (e.from.min(e.to), e.from.max(e.to));
            let entry = pairs.entry(key).or_insert(false);
            *entry |= !e.gen_allowed;
        }
        if pairs.is_empty() {
            return 0.0;
        }
        pairs.values().filter(|&&r| r).count() as f64 / pairs.len() as f64
    }

    /// Number of unordered node pairs joined by at least one edge.
    pub fn undirected_edge_count(&self) -> usize {
        let mut pairs: Vec<(NodeId, NodeId)> = self
            .edges
            .iter()
            .map(|e| (e.from.min(e.to), e.from.max(e.to)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs.len()
    }

    pub fn dimension(&self) -> u8 {
        if self.nodes.iter().any(|n| n.z.is_some()) {
            3
        } else {
            2
        }
    }
}

/// Compressed adjacency over edge ids, either outgoing or incoming.
#[derive(Clone, Debug)]
pub struct Adjacency {
    offsets: Vec<usize>,
    edges: Vec<EdgeId>,
}

impl Adjacency {
    pub fn outgoing(instance: &Instance) -> Adjacency {
        Self::build(instance, |e| e.from)
    }

    pub fn incoming(instance: &Instance) -> Adjacency {
        Self::build(instance, |e| e.to)
    }

    fn build(instance: &Instance, key: impl Fn(&Edge) -> NodeId) -> Adjacency {
        let n = instance.num_nodes();
        let mut offsets = vec![0usize; n + 1];
        for e in &instance.edges {
            offsets[key(e) + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut edges = vec![0; instance.edges.len()];
        for (id, e) in instance.edges.iter().enumerate() {
            let slot = &mut cursor[key(e)];
            edges[*slot] = id;
            *slot += 1;
        }
        Adjacency { offsets, edges }
    }

    pub fn of(&self, node: NodeId) -> &[EdgeId] {
        &self.edges[self.offsets[node]..self.offsets[node + 1]]
    }
}

//! Solutions and the independent feasibility checker.
//!
//! The checker replays the battery and fuel recurrences from scratch. It
//! shares nothing with the search beyond the update rule itself:
//!
//! ```text
//! startup = V if the generator turns on here (off on the previous edge or at S)
//! pre     = b - C - startup            must stay >= Bmin
//! b'      = min(Bmax, pre + Z*gen)
//! q'      = q - Z*gen                  must stay >= 0
//! ```

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{EdgeId, Instance, NodeId};
use crate::units::Units;

/// A path from start to goal with its generator schedule.
///
/// `battery` and `fuel` hold one entry per path node, in quantized units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub path: Vec<NodeId>,
    pub gen: Vec<bool>,
    pub cost: f64,
    pub battery: Vec<Units>,
    pub fuel: Vec<Units>,
}

impl Solution {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    pub fn from_json(text: &str) -> Result<Solution, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolutionViolation {
    EmptyPath,
    WrongStart(NodeId),
    WrongEnd(NodeId),
    RepeatedNode(NodeId),
    MissingEdge {
        from: NodeId,
        to: NodeId,
    },
    ScheduleLength {
        edges: usize,
        gen: usize,
    },
    NoiseRestriction {
        from: NodeId,
        to: NodeId,
    },
    BatteryBelowMin {
        node: NodeId,
    },
    FuelExhausted {
        node: NodeId,
    },
    TraceLength,
    BatteryTrace {
        index: usize,
        expected: Units,
        found: Units,
    },
    FuelTrace {
        index: usize,
        expected: Units,
        found: Units,
    },
    CostMismatch {
        expected: f64,
        found: f64,
    },
}

impl fmt::Display for SolutionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SolutionViolation::*;
        match self {
            EmptyPath => write!(f, "empty path"),
            WrongStart(n) => write!(f, "path starts at {n}, not at the start node"),
            WrongEnd(n) => write!(f, "path ends at {n}, not at the goal node"),
            RepeatedNode(n) => write!(f, "node {n} visited twice"),
            MissingEdge { from, to } => write!(f, "no edge {from} -> {to}"),
            ScheduleLength { edges, gen } => write!(f, "{gen} generator bits for {edges} edges"),
            NoiseRestriction { from, to } => write!(
                f,
                "noise restriction: generator on over edge {from} -> {to}"
            ),
            BatteryBelowMin { node } => write!(f, "battery below Bmin on the way to node {node}"),
            FuelExhausted { node } => write!(f, "fuel below zero at node {node}"),
            TraceLength => write!(f, "trace length differs from path length"),
            BatteryTrace {
                index,
                expected,
                found,
            } => {
                write!(
                    f,
                    "battery trace at position {index}: expected {expected}, found {found}"
                )
            }
            FuelTrace {
                index,
                expected,
                found,
            } => {
                write!(
                    f,
                    "fuel trace at position {index}: expected {expected}, found {found}"
                )
            }
            CostMismatch { expected, found } => {
                write!(f, "cost {found} differs from edge sum {expected}")
            }
        }
    }
}

impl std::error::Error for SolutionViolation {}

/// Recomputed quantities for a path and schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    pub edges: Vec<EdgeId>,
    pub cost: f64,
    pub battery: Vec<Units>,
    pub fuel: Vec<Units>,
}

/// Replays the resource recurrences along `path` with schedule `gen`.
///
/// Checks everything except the traces and cost stored in a [`Solution`].
pub fn replay(inst: &Instance, path: &[NodeId], gen: &[bool]) -> Result<Replay, SolutionViolation> {
    use SolutionViolation::*;
    let (&first, &last) = match (path.first(), path.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(EmptyPath),
    };
    if first != inst.start {
        return Err(WrongStart(first));
    }
    if last != inst.goal {
        return Err(WrongEnd(last));
    }
    if gen.len() + 1 != path.len() {
        return Err(ScheduleLength {
            edges: path.len() - 1,
            gen: gen.len(),
        });
    }
    let mut seen = vec![false; inst.num_nodes()];
    for &n in path {
        if n >= seen.len() || seen[n] {
            return Err(RepeatedNode(n));
        }
        seen[n] = true;
    }

    let lookup: HashMap<(NodeId, NodeId), EdgeId> = inst
        .edges
        .iter()
        .enumerate()
        .map(|(id, e)| ((e.from, e.to), id))
        .collect();

    let mut b = inst.b0.0;
    let mut q = inst.q0.0;
    let mut was_on = false;
    let mut cost = 0.0;
    let mut out = Replay {
        edges: Vec::with_capacity(gen.len()),
        cost: 0.0,
        battery: vec![inst.b0],
        fuel: vec![inst.q0],
    };
    for (w, &on) in path.windows(2).zip(gen) {
        let (from, to) = (w[0], w[1]);
        let id = *lookup.get(&(from, to)).ok_or(MissingEdge { from, to })?;
        let edge = &inst.edges[id];
        if on && !edge.gen_allowed {
            return Err(NoiseRestriction { from, to });
        }
        let startup = if on && !was_on { inst.startup.0 } else { 0 };
        let pre = b - edge.drain.0 - startup;
        if pre < inst.bmin.0 {
            return Err(BatteryBelowMin { node: to });
        }
        let gained = if on { edge.recharge.0 } else { 0 };
        b = (pre + gained).min(inst.bmax.0);
        q -= gained;
        if q < 0 {
            return Err(FuelExhausted { node: to });
        }
        cost += edge.cost;
        was_on = on;
        out.edges.push(id);
        out.battery.push(Units(b));
        out.fuel.push(Units(q));
    }
    out.cost = cost;
    Ok(out)
}

/// Verifies every solution invariant by replaying the recurrences.
pub fn check_solution(inst: &Instance, sol: &Solution) -> Result<(), SolutionViolation> {
    let replayed = replay(inst, &sol.path, &sol.gen)?;
    if sol.battery.len() != sol.path.len() || sol.fuel.len() != sol.path.len() {
        return Err(SolutionViolation::TraceLength);
    }
    for (index, (&expected, &found)) in replayed.battery.iter().zip(&sol.battery).enumerate() {
        if expected != found {
            return Err(SolutionViolation::BatteryTrace {
                index,
                expected,
                found,
            });
        }
    }
    for (index, (&expected, &found)) in replayed.fuel.iter().zip(&sol.fuel).enumerate() {
        if expected != found {
            return Err(SolutionViolation::FuelTrace {
                index,
                expected,
                found,
            });
        }
    }
    let tol = 1e-9 * replayed.cost.abs().max(1.0);
    if (replayed.cost - sol.cost).abs() > tol {
        return Err(SolutionViolation::CostMismatch {
            expected: replayed.cost,
            found: sol.cost,
        });
    }
    Ok(())
}

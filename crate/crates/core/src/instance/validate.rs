use std::collections::HashMap;
use std::fmt;

use super::{EdgeId, Instance, NodeId};

/// One broken instance invariant. Validation collects all of them.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    B0BelowBmin,
    B0AboveBmax,
    NegativeBmin,
    NegativeFuel,
    NegativeStartup,
    StartEqualsGoal,
    StartOutOfRange(NodeId),
    GoalOutOfRange(NodeId),
    NonFiniteCoordinate(NodeId),
    MixedDimensions,
    EndpointOutOfRange(EdgeId),
    SelfLoop(EdgeId),
    DuplicateEdge { edge: EdgeId, first: EdgeId },
    NonPositiveCost(EdgeId),
    NegativeDrain(EdgeId),
    NegativeRecharge(EdgeId),
    GlidingWithDrain(EdgeId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::B0BelowBmin => write!(f, "B0 below Bmin"),
            Violation::B0AboveBmax => write!(f, "B0 above Bmax"),
            Violation::NegativeBmin => write!(f, "Bmin is negative"),
            Violation::NegativeFuel => write!(f, "Q0 is negative"),
            Violation::NegativeStartup => write!(f, "startup drain V is negative"),
            Violation::StartEqualsGoal => write!(f, "start equals goal"),
            Violation::StartOutOfRange(n) => write!(f, "start node {n} does not exist"),
            Violation::GoalOutOfRange(n) => write!(f, "goal node {n} does not exist"),
            Violation::NonFiniteCoordinate(n) => write!(f, "node {n} has a non-finite coordinate"),
            Violation::MixedDimensions => write!(f, "nodes mix 2D and 3D coordinates"),
            Violation::EndpointOutOfRange(e) => write!(f, "edge {e} references a missing node"),
            Violation::SelfLoop(e) => write!(f, "edge {e} is a self-loop"),
            Violation::DuplicateEdge { edge, first } => {
                write!(f, "edge {edge} duplicates edge {first}")
            }
            Violation::NonPositiveCost(e) => {
                write!(f, "edge {e} has non-positive or non-finite cost")
            }
            Violation::NegativeDrain(e) => write!(f, "edge {e} has negative drain"),
            Violation::NegativeRecharge(e) => write!(f, "edge {e} has negative recharge"),
            Violation::GlidingWithDrain(e) => {
                write!(f, "gliding edge with nonzero drain (edge {e})")
            }
        }
    }
}

pub(super) fn validate(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = inst.num_nodes();

    if inst.bmin.0 < 0 {
        out.push(Violation::NegativeBmin);
    }
    if inst.b0 < inst.bmin {
        out.push(Violation::B0BelowBmin);
    }
    if inst.b0 > inst.bmax {
        out.push(Violation::B0AboveBmax);
    }
    if inst.q0.0 < 0 {
        out.push(Violation::NegativeFuel);
    }
    if inst.startup.0 < 0 {
        out.push(Violation::NegativeStartup);
    }
    if inst.start >= n {
        out.push(Violation::StartOutOfRange(inst.start));
    }
    if inst.goal >= n {
        out.push(Violation::GoalOutOfRange(inst.goal));
    }
    if inst.start == inst.goal {
        out.push(Violation::StartEqualsGoal);
    }

    for (id, node) in inst.nodes.iter().enumerate() {
        let finite =
            node.x.is_finite() && node.y.is_finite() && node.z.is_none_or(f64::is_finite);
        if !finite {
            out.push(Violation::NonFiniteCoordinate(id));
        }
    }
    let with_z = inst.nodes.iter().filter(|c| c.z.is_some()).count();
    if with_z != 0 && with_z != n {
        out.push(Violation::MixedDimensions);
    }

    let mut seen: HashMap<(NodeId, NodeId), EdgeId> = HashMap::with_capacity(inst.edges.len());
    for (id, e) in inst.edges.iter().enumerate() {
        if e.from >= n || e.to >= n {
            out.push(Violation::EndpointOutOfRange(id));
        }
        if e.from == e.to {
            out.push(Violation::SelfLoop(id));
        }
        if let Some(&first) = seen.get(&(e.from, e.to)) {
            out.push(Violation::DuplicateEdge { edge: id, first });
        } else {
            seen.insert((e.from, e.to), id);
        }
        if !(e.cost.is_finite() && e.cost > 0.0) {
            out.push(Violation::NonPositiveCost(id));
        }
        if e.drain.0 < 0 {
            out.push(Violation::NegativeDrain(id));
        }
        if e.recharge.0 < 0 {
            out.push(Violation::NegativeRecharge(id));
        }
        if e.gliding && e.drain.0 != 0 {
            out.push(Violation::GlidingWithDrain(id));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::test_support::{edge, instance};
    use crate::units::Units;

    fn base() -> Instance {
        instance(
            3,
            vec![edge(0, 1, 1.0, 1, 1, true), edge(1, 2, 1.0, 1, 1, true)],
            0,
            2,
        )
    }

    #[test]
    fn valid_instance_has_no_violations() {
        assert!(base().validate().is_empty());
    }

    #[test]
    fn b0_below_bmin() {
        let mut inst = base();
        inst.bmin = Units(5);
        inst.b0 = Units(3);
        let v = inst.validate();
        assert_eq!(v, vec![Violation::B0BelowBmin]);
        assert_eq!(v[0].to_string(), "B0 below Bmin");
    }

    #[test]
    fn gliding_edge_with_drain() {
        let mut inst = base();
        inst.edges[0].gliding = true;
        inst.edges[0].drain = Units(2);
        let v = inst.validate();
        assert_eq!(v, vec![Violation::GlidingWithDrain(0)]);
        assert!(v[0]
            .to_string()
            .starts_with("gliding edge with nonzero drain"));
    }

    #[test]
    fn reports_every_violation() {
        let mut inst = base();
        inst.goal = 0;
        inst.q0 = Units(-1);
        inst.edges.push(edge(1, 1, 0.0, -1, 0, true));
        inst.edges.push(edge(0, 1, 2.0, 0, 0, true));
        let v = inst.validate();
        assert!(v.contains(&Violation::StartEqualsGoal));
        assert!(v.contains(&Violation::NegativeFuel));
        assert!(v.contains(&Violation::SelfLoop(2)));
        assert!(v.contains(&Violation::NonPositiveCost(2)));
        assert!(v.contains(&Violation::NegativeDrain(2)));
        assert!(v.contains(&Violation::DuplicateEdge { edge: 3, first: 0 }));
    }

    #[test]
    fn mixed_dimensions_and_bad_coordinates() {
        let mut inst = base();
        inst.nodes[1].z = Some(1.0);
        inst.nodes[2].x = f64::NAN;
        let v = inst.validate();
        assert!(v.contains(&Violation::MixedDimensions));
        assert!(v.contains(&Violation::NonFiniteCoordinate(2)));
    }
}

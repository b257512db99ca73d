use crate::instance::{Edge, EdgeId, Instance, NodeId};
use crate::units::Units;

/// Index of a label in the label store. Ids are handed out in creation
/// order, which doubles as the FIFO tie-break.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelId(pub u32);

impl LabelId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// State of a partial path ending at `node`.
#[derive(Clone, Debug, PartialEq)]
pub struct Label {
    pub node: NodeId,
    /// Cost to arrive.
    pub cost: f64,
    pub battery: Units,
    pub fuel: Units,
    /// Generator state on the incoming edge; off at the start node.
    pub gen_on: bool,
    /// Cached `cost + h(node)`.
    pub f: f64,
    pub parent: Option<LabelId>,
    pub via: Option<EdgeId>,
}

impl Label {
    pub fn start(inst: &Instance, h_start: f64) -> Label {
        Label {
            node: inst.start,
            cost: 0.0,
            battery: inst.b0,
            fuel: inst.q0,
            gen_on: false,
            f: h_start,
            parent: None,
            via: None,
        }
    }

    /// Same cost, battery, fuel and generator state.
    pub fn equivalent(&self, other: &Label) -> bool {
        self.cost == other.cost
            && self.battery == other.battery
            && self.fuel == other.fuel
            && self.gen_on == other.gen_on
    }
}

/// `a` dominates `b`: no worse in cost, battery, fuel and generator state
/// (on counts as better than off), and not equivalent.
pub fn dominates(a: &Label, b: &Label) -> bool {
    debug_assert_eq!(a.node, b.node);
    a.cost <= b.cost
        && a.battery >= b.battery
        && a.fuel >= b.fuel
        && (a.gen_on || !b.gen_on)
        && !a.equivalent(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Infeasible {
    NoiseRestriction,
    BatteryBelowMin,
    FuelExhausted,
}

/// Applies one edge traversal to `label` without the revisit check.
///
/// Drain and startup are debited first and checked against `Bmin`; the
/// recharge is credited afterwards and clamped at `Bmax`.
pub fn extend_resources(
    label: &Label,
    edge_id: EdgeId,
    edge: &Edge,
    gen_on: bool,
    inst: &Instance,
) -> Result<Label, Infeasible> {
    debug_assert_eq!(edge.from, label.node);
    if gen_on && !edge.gen_allowed {
        return Err(Infeasible::NoiseRestriction);
    }
    let startup = if gen_on && !label.gen_on {
        inst.startup
    } else {
        Units::ZERO
    };
    let pre = label.battery - edge.drain - startup;
    if pre < inst.bmin {
        return Err(Infeasible::BatteryBelowMin);
    }
    let (battery, fuel) = if gen_on {
        (
            (pre + edge.recharge).min(inst.bmax),
            label.fuel - edge.recharge,
        )
    } else {
        (pre, label.fuel)
    };
    if fuel < Units::ZERO {
        return Err(Infeasible::FuelExhausted);
    }
    Ok(Label {
        node: edge.to,
        cost: label.cost + edge.cost,
        battery,
        fuel,
        gen_on,
        f: f64::NAN,
        parent: None,
        via: Some(edge_id),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::test_support::{edge, instance};

    fn label(cost: f64, battery: i64, fuel: i64, gen_on: bool) -> Label {
        Label {
            node: 0,
            cost,
            battery: Units(battery),
            fuel: Units(fuel),
            gen_on,
            f: cost,
            parent: None,
            via: None,
        }
    }

    #[test]
    fn strictly_better_label_dominates() {
        assert!(dominates(
            &label(5.0, 10, 10, true),
            &label(6.0, 9, 9, false)
        ));
        assert!(!dominates(
            &label(6.0, 9, 9, false),
            &label(5.0, 10, 10, true)
        ));
    }

    #[test]
    fn mixed_labels_are_incomparable() {
        let a = label(5.0, 10, 10, false);
        let b = label(4.0, 12, 8, false);
        assert!(!dominates(&a, &b));
        assert!(!dominates(&b, &a));
    }

    #[test]
    fn equal_labels_are_equivalent_not_dominating() {
        let a = label(5.0, 10, 10, true);
        let b = label(5.0, 10, 10, true);
        assert!(!dominates(&a, &b));
        assert!(a.equivalent(&b));
    }

    #[test]
    fn generator_state_breaks_ties() {
        assert!(dominates(
            &label(5.0, 10, 10, true),
            &label(5.0, 10, 10, false)
        ));
        assert!(!dominates(
            &label(5.0, 10, 10, false),
            &label(5.0, 10, 10, true)
        ));
        assert!(!dominates(
            &label(4.0, 10, 10, false),
            &label(5.0, 10, 10, true)
        ));
    }

    #[test]
    fn extend_with_and_without_generator() {
        let mut inst = instance(2, vec![edge(0, 1, 4.0, 3, 5, true)], 0, 1);
        inst.bmax = Units(20);
        inst.startup = Units(2);
        let from = label(10.0, 8, 12, false);
        let e = &inst.edges[0];

        let on = extend_resources(&from, 0, e, true, &inst).unwrap();
        assert_eq!(
            (on.cost, on.battery, on.fuel, on.gen_on),
            (14.0, Units(8), Units(7), true)
        );
        let off = extend_resources(&from, 0, e, false, &inst).unwrap();
        assert_eq!(
            (off.cost, off.battery, off.fuel, off.gen_on),
            (14.0, Units(5), Units(12), false)
        );
        assert_eq!(on.node, 1);
        assert_eq!(on.via, Some(0));
    }

    #[test]
    fn gliding_edge_recharges_without_drain() {
        let mut inst = instance(2, vec![edge(0, 1, 1.0, 0, 2, true)], 0, 1);
        inst.edges[0].gliding = true;
        inst.bmax = Units(6);
        let from = label(0.0, 5, 3, true);
        let next = extend_resources(&from, 0, &inst.edges[0], true, &inst).unwrap();
        assert_eq!(next.battery, Units(6)); // min(6, 5 + 2)
        assert_eq!(next.fuel, Units(1));
    }

    #[test]
    fn infeasible_extensions() {
        let mut inst = instance(2, vec![edge(0, 1, 1.0, 4, 5, false)], 0, 1);
        inst.bmin = Units(1);
        let from = label(0.0, 5, 3, false);
        let e = &inst.edges[0];
        assert_eq!(
            extend_resources(&from, 0, e, true, &inst),
            Err(Infeasible::NoiseRestriction)
        );
        assert!(extend_resources(&from, 0, e, false, &inst).is_ok());
        let low = label(0.0, 4, 3, false);
        assert_eq!(
            extend_resources(&low, 0, e, false, &inst),
            Err(Infeasible::BatteryBelowMin)
        );

        inst.edges[0].gen_allowed = true;
        let e = &inst.edges[0];
        assert_eq!(
            extend_resources(&from, 0, e, true, &inst),
            Err(Infeasible::FuelExhausted)
        );
    }

    #[test]
    fn startup_is_checked_before_recharge() {
        // 5 - 4 - 2 = -1 would dip below zero even though +5 recharge follows
        let mut inst = instance(2, vec![edge(0, 1, 1.0, 4, 5, true)], 0, 1);
        inst.startup = Units(2);
        let from = label(0.0, 5, 10, false);
        let e = &inst.edges[0];
        assert_eq!(
            extend_resources(&from, 0, e, true, &inst),
            Err(Infeasible::BatteryBelowMin)
        );
        // already running: no startup drain
        let running = label(0.0, 5, 10, true);
        assert_eq!(
            extend_resources(&running, 0, e, true, &inst)
                .unwrap()
                .battery,
            Units(6)
        );
    }
}

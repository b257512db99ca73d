use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::label::{dominates, Label, LabelId};
use crate::instance::NodeId;

/// Which labels may prune each other at a node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dominance {
    /// Compare cost, battery, fuel and generator state only. A dominating
    /// label may already have visited a node the dominated one still needs,
    /// so on rare instances the optimum is lost.
    #[default]
    Resource,
    /// Additionally require the dominating label's visited nodes to be a
    /// subset of the other's. Exact, but prunes far less on long paths.
    Elementary,
}

impl Dominance {
    pub const ALL: [Dominance; 2] = [Dominance::Resource, Dominance::Elementary];

    pub fn as_str(self) -> &'static str {
        match self {
            Dominance::Resource => "resource",
            Dominance::Elementary => "elementary",
        }
    }
}

impl fmt::Display for Dominance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dominance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "resource" => Ok(Dominance::Resource),
            "elementary" => Ok(Dominance::Elementary),
            other => Err(format!(
                "unknown dominance `{other}` (expected resource or elementary)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Open,
    Closed,
    /// Removed from open because a newer label dominated it.
    Pruned,
}

/// Heap key: smallest `f`, then larger battery, larger fuel, older label.
#[derive(Clone, Copy, Debug)]
struct QueueKey {
    f: f64,
    battery: i64,
    fuel: i64,
    id: LabelId,
}

impl QueueKey {
    fn of(id: LabelId, label: &Label) -> QueueKey {
        QueueKey {
            f: label.f,
            battery: label.battery.0,
            fuel: label.fuel.0,
            id,
        }
    }

    /// Ascending order of selection priority.
    fn priority(&self, other: &Self) -> Ordering {
        self.f
            .total_cmp(&other.f)
            .then_with(|| other.battery.cmp(&self.battery))
            .then_with(|| other.fuel.cmp(&self.fuel))
            .then_with(|| self.id.cmp(&other.id))
    }
}

impl PartialEq for QueueKey {
    fn eq(&self, other: &Self) -> bool {
        self.priority(other) == Ordering::Equal
    }
}

impl Eq for QueueKey {}

impl Ord for QueueKey {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap
        other.priority(self)
    }
}

impl PartialOrd for QueueKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    Dominated,
    Equivalent,
}

/// Open labels in a priority queue plus, per node, the efficient (mutually
/// non-dominated) open and closed labels. Owns every label ever inserted so
/// parent links stay valid.
#[derive(Debug)]
pub struct OpenList {
    labels: Vec<Label>,
    status: Vec<Status>,
    heap: BinaryHeap<QueueKey>,
    efficient: Vec<Vec<LabelId>>,
    open: usize,
    peak_open: usize,
    mode: Dominance,
    /// `stamp[node] == epoch` marks the nodes of the path being compared.
    stamp: Vec<u32>,
    epoch: u32,
}

impl OpenList {
    pub fn new(num_nodes: usize) -> OpenList {
        Self::with_dominance(num_nodes, Dominance::Resource)
    }

    pub fn with_dominance(num_nodes: usize, mode: Dominance) -> OpenList {
        OpenList {
            labels: Vec::new(),
            status: Vec::new(),
            heap: BinaryHeap::new(),
            efficient: vec![Vec::new(); num_nodes],
            open: 0,
            peak_open: 0,
            mode,
            stamp: if mode == Dominance::Elementary {
                vec![0; num_nodes]
            } else {
                Vec::new()
            },
            epoch: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.open
    }

    pub fn is_empty(&self) -> bool {
        self.open == 0
    }

    pub fn peak_len(&self) -> usize {
        self.peak_open
    }

    pub fn label(&self, id: LabelId) -> &Label {
        &self.labels[id.index()]
    }

    pub fn total_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn is_open(&self, id: LabelId) -> bool {
        self.status[id.index()] == Status::Open
    }

    /// Efficient labels currently stored at `node`, open or closed.
    pub fn efficient_at(&self, node: NodeId) -> &[LabelId] {
        &self.efficient[node]
    }

    /// Checks `label` against every efficient label at its node. Under
    /// [`Dominance::Elementary`] the label's parent must already be stored.
    pub fn check(&mut self, label: &Label) -> Result<(), Rejection> {
        let mut marked = false;
        for k in 0..self.efficient[label.node].len() {
            let id = self.efficient[label.node][k];
            let other = &self.labels[id.index()];
            let verdict = if other.equivalent(label) {
                Rejection::Equivalent
            } else if dominates(other, label) {
                Rejection::Dominated
            } else {
                continue;
            };
            if self.mode == Dominance::Elementary {
                if !marked {
                    self.mark(label.node, label.parent);
                    marked = true;
                }
                if !self.chain_marked(Some(id)) {
                    continue;
                }
            }
            return Err(verdict);
        }
        Ok(())
    }

    /// Stamps `node` and every node on the chain from `parent`.
    fn mark(&mut self, node: NodeId, parent: Option<LabelId>) {
        self.epoch += 1;
        if self.epoch == u32::MAX {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.stamp[node] = self.epoch;
        let mut cursor = parent;
        while let Some(c) = cursor {
            let l = &self.labels[c.index()];
            self.stamp[l.node] = self.epoch;
            cursor = l.parent;
        }
    }

    fn chain_marked(&self, from: Option<LabelId>) -> bool {
        let mut cursor = from;
        while let Some(c) = cursor {
            let l = &self.labels[c.index()];
            if self.stamp[l.node] != self.epoch {
                return false;
            }
            cursor = l.parent;
        }
        true
    }

    /// Whether `node` lies on the path of label `id` (including its end).
    pub fn path_contains(&self, id: LabelId, node: NodeId) -> bool {
        let mut cursor = Some(id);
        while let Some(c) = cursor {
            let l = &self.labels[c.index()];
            if l.node == node {
                return true;
            }
            cursor = l.parent;
        }
        false
    }

    /// Inserts a label that passed [`OpenList::check`] and evicts the labels
    /// it dominates. Returns the new id and the number of evicted labels.
    pub fn insert(&mut self, label: Label) -> (LabelId, usize) {
        let id = LabelId(u32::try_from(self.labels.len()).expect("label count fits in u32"));
        let node = label.node;
        let mut victims: Vec<LabelId> = Vec::new();
        for k in 0..self.efficient[node].len() {
            let other = self.efficient[node][k];
            if !dominates(&label, &self.labels[other.index()]) {
                continue;
            }
            if self.mode == Dominance::Elementary {
                // the victim's path must contain every node of the new one
                self.mark(node, Some(other));
                if !self.chain_marked(label.parent) {
                    continue;
                }
            }
            victims.push(other);
        }
        for &other in &victims {
            if self.status[other.index()] == Status::Open {
                self.status[other.index()] = Status::Pruned;
                self.open -= 1;
            }
        }
        if !victims.is_empty() {
            // both lists are in ascending id order
            self.efficient[node].retain(|other| victims.binary_search(other).is_err());
        }
        self.heap.push(QueueKey::of(id, &label));
        self.labels.push(label);
        self.status.push(Status::Open);
        self.efficient[node].push(id);
        self.open += 1;
        self.peak_open = self.peak_open.max(self.open);
        (id, victims.len())
    }

    fn pop_open(&mut self) -> Option<LabelId> {
        while let Some(key) = self.heap.pop() {
            if self.status[key.id.index()] == Status::Open {
                return Some(key.id);
            }
        }
        None
    }

    fn close(&mut self, id: LabelId) {
        debug_assert_eq!(self.status[id.index()], Status::Open);
        self.status[id.index()] = Status::Closed;
        self.open -= 1;
    }

    /// LABEL selection: removes and returns the best open label.
    pub fn select_label(&mut self) -> Option<LabelId> {
        let id = self.pop_open()?;
        self.close(id);
        Some(id)
    }

    /// NODE selection: finds the best open label and removes and returns
    /// every open label at its node, best first.
    pub fn select_node(&mut self) -> Option<(NodeId, Vec<LabelId>)> {
        let best = self.pop_open()?;
        let node = self.labels[best.index()].node;
        let mut ids: Vec<LabelId> = self.efficient[node]
            .iter()
            .copied()
            .filter(|&id| self.status[id.index()] == Status::Open)
            .collect();
        ids.sort_by(|&a, &b| {
            QueueKey::of(a, &self.labels[a.index()])
                .priority(&QueueKey::of(b, &self.labels[b.index()]))
        });
        debug_assert_eq!(ids.first(), Some(&best));
        for &id in &ids {
            self.close(id);
        }
        Some((node, ids))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::Units;

    fn label(node: NodeId, f: f64, battery: i64, fuel: i64) -> Label {
        Label {
            node,
            cost: f,
            battery: Units(battery),
            fuel: Units(fuel),
            gen_on: false,
            f,
            parent: None,
            via: None,
        }
    }

    #[test]
    fn select_label_returns_minimum_f() {
        let mut open = OpenList::new(3);
        // three incomparable labels at different nodes
        open.insert(label(0, 7.0, 1, 1));
        let (best, _) = open.insert(label(1, 5.0, 1, 1));
        open.insert(label(2, 9.0, 1, 1));
        assert_eq!(open.len(), 3);
        assert_eq!(open.select_label(), Some(best));
        assert_eq!(open.len(), 2);
    }

    #[test]
    fn ties_prefer_more_battery_then_fuel_then_age() {
        let mut open = OpenList::new(4);
        let (low, _) = open.insert(label(0, 5.0, 3, 9));
        let (high, _) = open.insert(label(1, 5.0, 4, 1));
        let (fuel, _) = open.insert(label(2, 5.0, 3, 10));
        let (older, _) = open.insert(label(3, 5.0, 3, 9));
        assert_eq!(open.select_label(), Some(high));
        assert_eq!(open.select_label(), Some(fuel));
        assert_eq!(open.select_label(), Some(low));
        assert_eq!(open.select_label(), Some(older));
        assert_eq!(open.select_label(), None);
    }

    #[test]
    fn select_node_returns_all_open_labels_of_the_node() {
        let mut open = OpenList::new(2);
        let (a, _) = open.insert(label(0, 5.0, 1, 9));
        let (b, _) = open.insert(label(0, 8.0, 9, 1));
        open.insert(label(1, 6.0, 1, 1));
        assert_eq!(open.select_node(), Some((0, vec![a, b])));
        assert_eq!(open.len(), 1);
    }

    #[test]
    fn select_node_single_label_matches_select_label() {
        let mut by_node = OpenList::new(2);
        let mut by_label = OpenList::new(2);
        for open in [&mut by_node, &mut by_label] {
            open.insert(label(0, 4.0, 1, 1));
            open.insert(label(1, 6.0, 1, 1));
        }
        let (node, ids) = by_node.select_node().unwrap();
        assert_eq!(ids, vec![by_label.select_label().unwrap()]);
        assert_eq!(node, 0);
    }

    #[test]
    fn select_node_skips_closed_labels() {
        let mut open = OpenList::new(2);
        let (a, _) = open.insert(label(0, 1.0, 1, 9));
        assert_eq!(open.select_label(), Some(a));
        let (b, _) = open.insert(label(0, 2.0, 9, 1));
        assert_eq!(open.select_node(), Some((0, vec![b])));
        assert_eq!(open.efficient_at(0), &[a, b]);
    }

    #[test]
    fn insertion_evicts_dominated_open_labels() {
        let mut open = OpenList::new(1);
        let (weak, _) = open.insert(label(0, 5.0, 1, 1));
        let strong = label(0, 4.0, 2, 2);
        assert_eq!(open.check(&strong), Ok(()));
        let (id, evicted) = open.insert(strong);
        assert_eq!(evicted, 1);
        assert!(!open.is_open(weak));
        assert_eq!(open.len(), 1);
        assert_eq!(open.efficient_at(0), &[id]);
        assert_eq!(open.check(&label(0, 5.0, 1, 1)), Err(Rejection::Dominated));
        assert_eq!(open.check(&label(0, 4.0, 2, 2)), Err(Rejection::Equivalent));
        assert_eq!(open.select_label(), Some(id));
        assert_eq!(open.select_label(), None);
    }

    #[test]
    fn path_contains_walks_parents() {
        let mut open = OpenList::new(3);
        let (root, _) = open.insert(label(0, 0.0, 1, 1));
        let mut child = label(1, 1.0, 1, 1);
        child.parent = Some(root);
        let (c, _) = open.insert(child);
        assert!(open.path_contains(c, 0));
        assert!(open.path_contains(c, 1));
        assert!(!open.path_contains(c, 2));
    }

    #[test]
    fn elementary_mode_keeps_labels_with_fewer_visited_nodes() {
        // a: 0 -> 1 -> 2, b: 0 -> 2; a is better on resources but has
        // visited node 1, which b may still need
        for (mode, kept) in [(Dominance::Resource, false), (Dominance::Elementary, true)] {
            let mut open = OpenList::with_dominance(3, mode);
            let (root, _) = open.insert(label(0, 0.0, 9, 9));
            let mut mid = label(1, 1.0, 9, 9);
            mid.parent = Some(root);
            let (mid, _) = open.insert(mid);
            let mut a = label(2, 2.0, 9, 9);
            a.parent = Some(mid);
            open.insert(a);
            let mut b = label(2, 3.0, 5, 5);
            b.parent = Some(root);
            assert_eq!(open.check(&b).is_ok(), kept, "{mode:?}");
        }
    }

    #[test]
    fn elementary_mode_still_prunes_when_paths_nest() {
        let mut open = OpenList::with_dominance(3, Dominance::Elementary);
        let (root, _) = open.insert(label(0, 0.0, 9, 9));
        let mut direct = label(2, 2.0, 9, 9);
        direct.parent = Some(root);
        let (direct, _) = open.insert(direct);
        let (mid, _) = {
            let mut m = label(1, 1.0, 9, 9);
            m.parent = Some(root);
            open.insert(m)
        };
        let mut detour = label(2, 3.0, 5, 5);
        detour.parent = Some(mid);
        assert_eq!(open.check(&detour), Err(Rejection::Dominated));
        // and a newcomer with a subset path evicts a worse superset label
        let mut open = OpenList::with_dominance(3, Dominance::Elementary);
        let (root, _) = open.insert(label(0, 0.0, 9, 9));
        let (mid, _) = {
            let mut m = label(1, 1.0, 9, 9);
            m.parent = Some(root);
            open.insert(m)
        };
        let mut worse = label(2, 3.0, 5, 5);
        worse.parent = Some(mid);
        let (worse, _) = open.insert(worse);
        let mut better = label(2, 2.0, 9, 9);
        better.parent = Some(root);
        assert_eq!(open.check(&better), Ok(()));
        let (_, evicted) = open.insert(better);
        assert_eq!(evicted, 1);
        assert!(!open.is_open(worse));
        let _ = direct;
    }
}

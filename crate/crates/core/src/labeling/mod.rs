//! Label-correcting search.
//!
//! Each label is a partial simple path summarized by cost, battery, fuel and
//! generator state. Labels are selected in order of `f = cost + h(node)`;
//! the first time a goal label is selected it is optimal. Treating a label
//! extends it over every outgoing edge twice, generator on and off, keeping
//! an extension only when it is feasible, does not revisit a node, and is not
//! dominated by (or equivalent to) an open or closed label at its node.
//!
//! Two selection rules are provided: [`Selection::Label`] treats the single
//! best open label, [`Selection::Node`] treats every open label of the node
//! that owns the best label.
//!
//! [`Dominance::Resource`] compares resources only. Because paths must stay
//! simple, that rule can discard a label whose completion the dominating
//! label cannot use; [`Dominance::Elementary`] closes the gap at a large cost
//! in pruning power.

mod label;
mod open;

pub use label::{dominates, extend_resources, Infeasible, Label, LabelId};
pub use open::{Dominance, OpenList, Rejection};

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::heuristics::{HeuristicError, HeuristicKind, HeuristicTable};
use crate::instance::{Adjacency, EdgeId, Instance, Solution, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    Label,
    Node,
}

impl Selection {
    pub const ALL: [Selection; 2] = [Selection::Label, Selection::Node];

    pub fn as_str(self) -> &'static str {
        match self {
            Selection::Label => "label",
            Selection::Node => "node",
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Selection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "label" => Ok(Selection::Label),
            "node" => Ok(Selection::Node),
            other => Err(format!(
                "unknown selection `{other}` (expected label or node)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Limits {
    pub max_labels: Option<u64>,
    pub max_time: Option<Duration>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub selection: Selection,
    pub heuristic: HeuristicKind,
    pub dominance: Dominance,
    pub limits: Limits,
}

impl SolverConfig {
    pub fn new(selection: Selection, heuristic: HeuristicKind) -> SolverConfig {
        SolverConfig {
            selection,
            heuristic,
            dominance: Dominance::Resource,
            limits: Limits::default(),
        }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::new(Selection::Label, HeuristicKind::Sup)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Labels accepted into the open list, the start label included.
    pub labels_created: u64,
    pub labels_treated: u64,
    /// Extensions rejected as dominated or equivalent, plus open labels
    /// evicted by a dominating newcomer.
    pub labels_pruned: u64,
    pub peak_open: u64,
    /// Largest number of labels created at any single node.
    pub max_labels_at_node: u64,
    /// Search time in seconds, excluding heuristic construction.
    pub wall_time: f64,
    pub heuristic_time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Optimal {
        solution: Solution,
        stats: SolveStats,
    },
    /// The open list emptied without reaching the goal.
    Infeasible { stats: SolveStats },
}

impl SolveOutcome {
    pub fn stats(&self) -> &SolveStats {
        match self {
            SolveOutcome::Optimal { stats, .. } | SolveOutcome::Infeasible { stats } => stats,
        }
    }

    pub fn solution(&self) -> Option<&Solution> {
        match self {
            SolveOutcome::Optimal { solution, .. } => Some(solution),
            SolveOutcome::Infeasible { .. } => None,
        }
    }

    pub fn cost(&self) -> Option<f64> {
        self.solution().map(|s| s.cost)
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid instance: {0:?}")]
    InvalidInstance(Vec<Violation>),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error("search limit reached; best open bound {bound}")]
    LimitExceeded { bound: f64, stats: SolveStats },
}

/// Validates the instance, builds the configured heuristic and searches.
pub fn solve(inst: &Instance, config: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    let violations = inst.validate();
    if !violations.is_empty() {
        return Err(SolveError::InvalidInstance(violations));
    }
    let t0 = Instant::now();
    let table = HeuristicTable::build(config.heuristic, inst)?;
    let heuristic_time = t0.elapsed().as_secs_f64();
    let mut outcome = search(inst, &table, config);
    match &mut outcome {
        Ok(SolveOutcome::Optimal { stats, .. }) | Ok(SolveOutcome::Infeasible { stats }) => {
            stats.heuristic_time = heuristic_time;
        }
        Err(SolveError::LimitExceeded { stats, .. }) => stats.heuristic_time = heuristic_time,
        Err(_) => {}
    }
    outcome
}

/// Runs the search with a prebuilt heuristic. The instance must be valid.
/// `config.heuristic` is ignored in favour of `table`.
pub fn search(
    inst: &Instance,
    table: &HeuristicTable,
    config: &SolverConfig,
) -> Result<SolveOutcome, SolveError> {
    Search::new(inst, table, config).run(config.selection)
}

struct Search<'a> {
    inst: &'a Instance,
    h: &'a [f64],
    limits: &'a Limits,
    out: Adjacency,
    open: OpenList,
    stats: SolveStats,
    created_at: Vec<u64>,
    started: Instant,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, table: &'a HeuristicTable, config: &'a SolverConfig) -> Search<'a> {
        Search {
            inst,
            h: &table.h,
            limits: &config.limits,
            out: Adjacency::outgoing(inst),
            open: OpenList::with_dominance(inst.num_nodes(), config.dominance),
            stats: SolveStats::default(),
            created_at: vec![0; inst.num_nodes()],
            started: Instant::now(),
        }
    }

    fn run(mut self, selection: Selection) -> Result<SolveOutcome, SolveError> {
        let inst = self.inst;
        let h_start = self.h[inst.start];
        if h_start.is_finite() {
            self.accept(Label::start(inst, h_start));
        }
        let mut iterations: u64 = 0;
        loop {
            iterations += 1;
            if iterations.is_multiple_of(256) {
                self.check_time()?;
            }
            let batch = match selection {
                Selection::Label => self
                    .open
                    .select_label()
                    .map(|id| (self.open.label(id).node, vec![id])),
                Selection::Node => self.open.select_node(),
            };
            let Some((node, ids)) = batch else {
                return Ok(SolveOutcome::Infeasible {
                    stats: self.finish(),
                });
            };
            if node == inst.goal {
                // ids are sorted best first
                let solution = extract_path(&self.open, ids[0]);
                return Ok(SolveOutcome::Optimal {
                    solution,
                    stats: self.finish(),
                });
            }
            for id in ids {
                self.treat(id)?;
            }
        }
    }

    fn treat(&mut self, id: LabelId) -> Result<(), SolveError> {
        self.stats.labels_treated += 1;
        let inst = self.inst;
        let node = self.open.label(id).node;
        for k in 0..self.out.of(node).len() {
            let edge_id: EdgeId = self.out.of(node)[k];
            let edge = &inst.edges[edge_id];
            let h = self.h[edge.to];
            if !h.is_finite() {
                continue;
            }
            for gen_on in [true, false] {
                let Ok(mut next) =
                    extend_resources(self.open.label(id), edge_id, edge, gen_on, inst)
                else {
                    continue;
                };
                next.parent = Some(id);
                if self.open.check(&next).is_err() {
                    self.stats.labels_pruned += 1;
                    continue;
                }
                if self.open.path_contains(id, edge.to) {
                    continue;
                }
                next.f = next.cost + h;
                self.accept(next);
            }
        }
        if let Some(max) = self.limits.max_labels {
            if self.stats.labels_created > max {
                return Err(self.limit_exceeded());
            }
        }
        Ok(())
    }

    fn accept(&mut self, label: Label) {
        let node = label.node;
        let (_, evicted) = self.open.insert(label);
        self.stats.labels_created += 1;
        self.stats.labels_pruned += evicted as u64;
        self.created_at[node] += 1;
        self.stats.max_labels_at_node = self.stats.max_labels_at_node.max(self.created_at[node]);
    }

    fn check_time(&mut self) -> Result<(), SolveError> {
        match self.limits.max_time {
            Some(limit) if self.started.elapsed() > limit => Err(self.limit_exceeded()),
            _ => Ok(()),
        }
    }

    fn limit_exceeded(&mut self) -> SolveError {
        let bound = match self.open.select_label() {
            Some(id) => self.open.label(id).f,
            None => f64::INFINITY,
        };
        SolveError::LimitExceeded {
            bound,
            stats: self.finish(),
        }
    }

    fn finish(&mut self) -> SolveStats {
        let mut stats = std::mem::take(&mut self.stats);
        stats.peak_open = self.open.peak_len() as u64;
        stats.wall_time = self.started.elapsed().as_secs_f64();
        stats
    }
}

/// Walks the parent chain of `id` and returns the corresponding solution.
pub fn extract_path(open: &OpenList, id: LabelId) -> Solution {
    let mut chain = Vec::new();
    let mut cursor = Some(id);
    while let Some(c) = cursor {
        let l = open.label(c);
        chain.push(l);
        cursor = l.parent;
    }
    chain.reverse();
    Solution {
        path: chain.iter().map(|l| l.node).collect(),
        gen: chain.iter().skip(1).map(|l| l.gen_on).collect(),
        cost: open.label(id).cost,
        battery: chain.iter().map(|l| l.battery).collect(),
        fuel: chain.iter().map(|l| l.fuel).collect(),
    }
}

#[cfg(test)]
mod tests;

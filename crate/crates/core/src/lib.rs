//! Exact solver for the noise-restricted hybrid-fuel shortest path problem.
//!
//! A hybrid UAV carries a battery and a fuel-burning generator. Every edge of
//! the graph drains the battery, the generator may recharge it while burning
//! fuel, starting the generator costs a fixed battery drain, and some edges
//! forbid running the generator at all. The solver finds the minimum-cost
//! simple path together with the generator on/off schedule.
//!
//! Module map:
//!
//! - [`instance`]: problem data, validation, JSON file format, and the
//!   independent feasibility checker for solutions.
//! - [`heuristics`]: admissible cost-to-go tables (straight-line, shortest
//!   unconstrained path, zero).
//! - [`labeling`]: the label-correcting search with LABEL and NODE selection.
//! - [`generators`]: seeded Euclidean k-NN and lattice instance families.
//! - [`verify`]: brute-force oracle and MILP (LP file) export/import.

pub mod generators;
pub mod heuristics;
pub mod instance;
pub mod labeling;
pub mod units;
pub mod verify;

pub use heuristics::{HeuristicKind, HeuristicTable};
pub use instance::{Edge, EdgeId, Instance, NodeCoord, NodeId, Solution};
pub use labeling::{solve, Selection, SolveOutcome, SolveStats, SolverConfig};
pub use units::{Quantization, Units};

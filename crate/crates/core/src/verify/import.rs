//! Reads an external MILP solver's variable values back into a [`Solution`].
//!
//! Input is plain text, one `name value` pair per line. Blank lines and lines
//! starting with `#` or `\` are skipped; variables other than `x_u_v` and
//! `g_u_v` are ignored; missing variables are zero.

use std::collections::HashMap;

use thiserror::Error;

use crate::instance::{replay, Instance, NodeId, Solution, SolutionViolation};

/// Distance from 0 or 1 still accepted as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum ImportError {
    #[error("line {line}: expected `name value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: `{name}` does not name an edge of the instance")]
    UnknownEdge { line: usize, name: String },
    #[error("fractional assignment {name} = {value}")]
    Fractional { name: String, value: f64 },
    #[error("no outgoing start edge selected")]
    NoStartEdge,
    #[error("branching at node {0}: more than one selected outgoing edge")]
    Branching(NodeId),
    #[error("cycle through node {0}")]
    Cycle(NodeId),
    #[error("path stops at node {0} before the goal")]
    DeadEnd(NodeId),
    #[error("subtour detected: {0} selected edges are off the start-goal path")]
    Subtour(usize),
    #[error("generator on over unselected edge {0}")]
    GeneratorOffPath(String),
    #[error("reconstructed path is infeasible: {0}")]
    Infeasible(SolutionViolation),
}

fn binary(name: &str, value: f64) -> Result<bool, ImportError> {
    if value.abs() <= INTEGRALITY_TOL {
        Ok(false)
    } else if (value - 1.0).abs() <= INTEGRALITY_TOL {
        Ok(true)
    } else {
        Err(ImportError::Fractional {
            name: name.to_string(),
            value,
        })
    }
}

/// Rebuilds the path and generator schedule from `x`/`g` values and replays
/// it, so the returned traces are the solver's own resource semantics.
pub fn import_milp_solution(inst: &Instance, text: &str) -> Result<Solution, ImportError> {
    let index: HashMap<(NodeId, NodeId), usize> = inst
        .edges
        .iter()
        .enumerate()
        .map(|(id, e)| ((e.from, e.to), id))
        .collect();
    let mut used = vec![false; inst.num_edges()];
    let mut gen = vec![false; inst.num_edges()];

    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('\\') {
            continue;
        }
        let syntax = || ImportError::Syntax {
            line: k + 1,
            text: line.to_string(),
        };
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(syntax());
        };
        let value: f64 = value.parse().map_err(|_| syntax())?;
        let target = match name.get(..2) {
            Some("x_") => &mut used,
            Some("g_") => &mut gen,
            _ => continue,
        };
        let unknown = || ImportError::UnknownEdge {
            line: k + 1,
            name: name.to_string(),
        };
        let mut ends = name[2..].split('_').map(|s| s.parse::<NodeId>());
        let (Some(Ok(u)), Some(Ok(v)), None) = (ends.next(), ends.next(), ends.next()) else {
            return Err(unknown());
        };
        let &id = index.get(&(u, v)).ok_or_else(unknown)?;
        target[id] = binary(name, value)?;
    }

    let mut path = vec![inst.start];
    let mut schedule = Vec::new();
    let mut seen = vec![false; inst.num_nodes()];
    seen[inst.start] = true;
    let mut on_path = vec![false; inst.num_edges()];
    let mut node = inst.start;
    while node != inst.goal {
        let mut chosen =
            (0..inst.num_edges()).filter(|&id| used[id] && inst.edges[id].from == node);
        let Some(id) = chosen.next() else {
            return Err(if node == inst.start {
                ImportError::NoStartEdge
            } else {
                ImportError::DeadEnd(node)
            });
        };
        if chosen.next().is_some() {
            return Err(ImportError::Branching(node));
        }
        let next = inst.edges[id].to;
        if seen[next] {
            return Err(ImportError::Cycle(next));
        }
        seen[next] = true;
        on_path[id] = true;
        path.push(next);
        schedule.push(gen[id]);
        node = next;
    }
    let stray = (0..inst.num_edges())
        .filter(|&id| used[id] && !on_path[id])
        .count();
    if stray > 0 {
        return Err(ImportError::Subtour(stray));
    }
    if let Some(id) = (0..inst.num_edges()).find(|&id| gen[id] && !used[id]) {
        let e = &inst.edges[id];
        return Err(ImportError::GeneratorOffPath(format!(
            "g_{}_{}",
            e.from, e.to
        )));
    }

    let r = replay(inst, &path, &schedule).map_err(ImportError::Infeasible)?;
    Ok(Solution {
        path,
        gen: schedule,
        cost: r.cost,
        battery: r.battery,
        fuel: r.fuel,
    })
}

//! Exhaustive enumeration of simple start-goal paths and generator patterns.
//!
//! The resource update is written out again here on purpose: the oracle must
//! not share code with the search it checks.

use thiserror::Error;

use crate::instance::{Adjacency, Instance, NodeId, Solution};
use crate::units::Units;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_nodes: usize,
    /// Maximum number of edge traversals tried during the enumeration.
    pub max_steps: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_nodes: 12,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance has {nodes} nodes, oracle budget allows {max}")]
    TooManyNodes { nodes: usize, max: usize },
    #[error("enumeration exceeded {0} steps")]
    BudgetExceeded(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    /// `None` when no path admits a feasible schedule.
    pub best: Option<Solution>,
    /// Feasible (path, generator pattern) pairs that reached the goal.
    pub enumerated_count: u64,
    pub steps: u64,
}

impl OracleResult {
    pub fn optimal_cost(&self) -> Option<f64> {
        self.best.as_ref().map(|s| s.cost)
    }

    pub fn is_infeasible(&self) -> bool {
        self.best.is_none()
    }
}

pub fn oracle_solve(inst: &Instance) -> Result<OracleResult, OracleError> {
    oracle_solve_with(inst, OracleBudget::default())
}

pub fn oracle_solve_with(
    inst: &Instance,
    budget: OracleBudget,
) -> Result<OracleResult, OracleError> {
    if inst.num_nodes() > budget.max_nodes {
        return Err(OracleError::TooManyNodes {
            nodes: inst.num_nodes(),
            max: budget.max_nodes,
        });
    }
    let mut walk = Walk {
        inst,
        out: Adjacency::outgoing(inst),
        budget: budget.max_steps,
        on_path: vec![false; inst.num_nodes()],
        path: vec![inst.start],
        gen: Vec::new(),
        battery: vec![inst.b0.0],
        fuel: vec![inst.q0.0],
        best: None,
        enumerated: 0,
        steps: 0,
    };
    walk.on_path[inst.start] = true;
    walk.descend(inst.start, 0.0, inst.b0.0, inst.q0.0, false)?;
    Ok(OracleResult {
        best: walk.best,
        enumerated_count: walk.enumerated,
        steps: walk.steps,
    })
}

struct Walk<'a> {
    inst: &'a Instance,
    out: Adjacency,
    budget: u64,
    on_path: Vec<bool>,
    path: Vec<NodeId>,
    gen: Vec<bool>,
    battery: Vec<i64>,
    fuel: Vec<i64>,
    best: Option<Solution>,
    enumerated: u64,
    steps: u64,
}

impl Walk<'_> {
    fn descend(
        &mut self,
        node: NodeId,
        cost: f64,
        b: i64,
        q: i64,
        running: bool,
    ) -> Result<(), OracleError> {
        let inst = self.inst;
        if node == inst.goal {
            self.enumerated += 1;
            if self.best.as_ref().is_none_or(|s| cost < s.cost) {
                self.best = Some(Solution {
                    path: self.path.clone(),
                    gen: self.gen.clone(),
                    cost,
                    battery: self.battery.iter().map(|&x| Units(x)).collect(),
                    fuel: self.fuel.iter().map(|&x| Units(x)).collect(),
                });
            }
            return Ok(());
        }
        for k in 0..self.out.of(node).len() {
            let e = &inst.edges[self.out.of(node)[k]];
            if self.on_path[e.to] {
                continue;
            }
            for on in [false, true] {
                self.steps += 1;
                if self.steps > self.budget {
                    return Err(OracleError::BudgetExceeded(self.budget));
                }
                if on && !e.gen_allowed {
                    continue;
                }
                let mut nb = b - e.drain.0;
                if on && !running {
                    nb -= inst.startup.0;
                }
                if nb < inst.bmin.0 {
                    continue;
                }
                let mut nq = q;
                if on {
                    nb = std::cmp::min(nb + e.recharge.0, inst.bmax.0);
                    nq -= e.recharge.0;
                    if nq < 0 {
                        continue;
                    }
                }
                self.on_path[e.to] = true;
                self.path.push(e.to);
                self.gen.push(on);
                self.battery.push(nb);
                self.fuel.push(nq);
                let r = self.descend(e.to, cost + e.cost, nb, nq, on);
                self.on_path[e.to] = false;
                self.path.pop();
                self.gen.pop();
                self.battery.pop();
                self.fuel.pop();
                r?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::check_solution;
    use crate::instance::test_support::triangle;

    #[test]
    fn triangle_optimum_is_the_detour() {
        let r = oracle_solve(&triangle()).unwrap();
        let best = r.best.unwrap();
        assert_eq!(best.cost, 12.0);
        assert_eq!(best.path, vec![0, 1, 2]);
        assert_eq!(best.gen, vec![false, false]);
        // hand count: the detour with gen off on both edges is the only
        // feasible pair; every gen-on pattern needs fuel
        assert_eq!(r.enumerated_count, 1);
        assert_eq!(check_solution(&triangle(), &best), Ok(()));
    }

    #[test]
    fn infeasible_everywhere() {
        let mut inst = triangle();
        inst.edges[1].drain = Units(9);
        let r = oracle_solve(&inst).unwrap();
        assert!(r.is_infeasible());
        assert_eq!(r.enumerated_count, 0);
    }

    #[test]
    fn zero_fuel_only_enumerates_generator_off_patterns() {
        let mut inst = triangle();
        inst.edges[0].drain = Units(1);
        for e in &mut inst.edges {
            e.recharge = Units(2);
        }
        let r = oracle_solve(&inst).unwrap();
        // two paths, each only feasible with everything off
        assert_eq!(r.enumerated_count, 2);
        assert!(r.best.unwrap().gen.iter().all(|&g| !g));
    }

    #[test]
    fn full_enumeration_count_without_pruning() {
        // plenty of everything: 2 paths, 2^1 + 2^2 patterns
        let mut inst = triangle();
        inst.edges[0].drain = Units(0);
        inst.q0 = Units(100);
        let r = oracle_solve(&inst).unwrap();
        assert_eq!(r.enumerated_count, 6);
        assert_eq!(r.optimal_cost(), Some(10.0));
    }

    #[test]
    fn budget_guards() {
        let inst = triangle();
        let tight = OracleBudget {
            max_nodes: 2,
            max_steps: 10,
        };
        assert_eq!(
            oracle_solve_with(&inst, tight),
            Err(OracleError::TooManyNodes { nodes: 3, max: 2 })
        );
        let tiny = OracleBudget {
            max_nodes: 12,
            max_steps: 1,
        };
        assert_eq!(
            oracle_solve_with(&inst, tiny),
            Err(OracleError::BudgetExceeded(1))
        );
    }
}

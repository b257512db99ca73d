//! Independent checks of solver output: brute-force enumeration on small
//! graphs and a MILP model that external solvers can read.

mod import;
mod milp;
mod oracle;

pub use import::{import_milp_solution, ImportError, INTEGRALITY_TOL};
pub use milp::{export_milp, BigM, Breach, ExportOptions, MilpModel, Row, Sense, Var, VarKind};
pub use oracle::{oracle_solve, oracle_solve_with, OracleBudget, OracleError, OracleResult};

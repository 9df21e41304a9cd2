//! Solver-neutral MILP model, LP relaxation, branch and bound, solution
//! checking and MPS export.

mod bnb;
mod check;
mod lp;
mod mps;
mod problem;

pub use bnb::{
    branch_and_bound, relative_gap, BranchOptions, MilpSolution, MilpStatus, DEFAULT_GAP, DEFAULT_NODE_BUDGET,
    INTEGRALITY_TOL,
};
pub use check::{check_solution, CheckReport, Violation, FEASIBILITY_TOL};
pub use lp::{solve_lp, LpSolution};
pub use mps::export_mps;
pub use problem::{Constraint, MilpProblem, Relation, Sense, VarId, Variable};

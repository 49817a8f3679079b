//! Core algorithms for the multi-depot multiple set orienteering problem
//! (mDmSOP).
//!
//! Nodes are partitioned into sets carrying a profit. Each of `m` travelers
//! leaves its own depot, visits at most one node of each set it claims and
//! returns home. A set can be claimed by at most one traveler, every traveler
//! must be used, and tour lengths are bounded either cumulatively or per
//! traveler. The goal is to maximize the collected profit.
//!
//! The crate is `no_std` (with `alloc`) and carries no IO. File formats,
//! wall clocks and the command line live in the `mdmsop` crate.
//!
//! Identifier conventions used throughout: node ids are 1-based (`1..=n` for
//! the original nodes, `n+1..=n+m` for depots) and set ids are 1-based
//! (`1..=r` for profit sets, `r+1..=r+m` for the singleton depot sets).

#![no_std]

extern crate alloc;

pub mod choice;
pub mod clock;
pub mod construct;
pub mod exact;
pub mod generate;
pub mod ilp;
pub mod instance;
pub mod solution;
pub mod vns;

pub use choice::Choices;
pub use clock::{Clock, NoClock};
pub use construct::{
    greedy_insert, hungarian, hungarian_seed, initial_solution, Assignment, AssignmentError,
    AssignmentProblem, Infeasible,
};
pub use exact::{solve_exact, ExactLimits, ExactResult, ExactSolution, LimitExceeded};
pub use ilp::{
    build_model, check_against_model, check_routes, Constraint, IlpModel, ModelChecker,
    ModelVerdict, SecVariant, Sense, VarKind, Variable,
};
pub use instance::{
    euclidean_cost, profit_of_set, BudgetMode, CostMatrix, GtspInstance, InstanceError,
    MdmsopInstance, Point, ProfitRule,
};
pub use solution::{
    evaluate, is_valid, profit, Arrangement, DpTable, Evaluation, Validity, Violation,
};
pub use vns::{run_restart, run_vns, RestartOutcome, RunReport, StopReason, VnsConfig};

/// Integer tour length / edge weight.
pub type Cost = i64;

/// Integer set profit.
pub type Profit = i64;

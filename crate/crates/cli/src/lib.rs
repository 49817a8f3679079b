//! File formats, reports and the command-line front end for the solver.

pub mod bench;
pub mod cli;
pub mod clock;
pub mod config;
pub mod gtsp;
pub mod instance_file;
pub mod lp;
pub mod optima;
pub mod solution_file;
pub mod verify;

//! File formats, solver plumbing and the command-line driver around
//! `ic4-core`.

pub mod aiger;
pub mod cli;
pub mod dimacs;
pub mod external;
pub mod fuzz;
pub mod record;
pub mod solver_log;
pub mod witness;

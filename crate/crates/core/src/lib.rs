//! Frame-based safety checking of AIG circuits.
//!
//! The crate is `no_std` (with `alloc`): circuits come in as [`aig::AigCircuit`]
//! values and results go out as plain data. Parsing, printing and the command
//! line live in the companion `ic4` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod aig;
pub mod certify;
pub mod engine;
pub mod fixtures;
pub mod frames;
mod ic4;
pub mod logic;
pub mod oracle;
pub mod pd;
pub mod random;
pub mod reach;
pub mod run;
pub mod sat;
pub mod stats;
pub mod ts;
pub mod verdict;

pub use run::{prove_ic3, prove_ic4, EngineKind, RunResult};
pub use pd::prove_pd;
pub use verdict::{EffortMode, HeuristicBudget, Invariant, Options, Trace, UnknownReason, Verdict};

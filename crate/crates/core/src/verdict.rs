use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::num::{NonZeroU64, NonZeroUsize};

use serde::{Deserialize, Serialize};

use crate::logic::{Clause, InputVec, State};
use crate::sat::{bundled_factory, SolverFactory};

/// A path from an initial state: `inputs[j]` drives `states[j]` to
/// `states[j + 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub states: Vec<State>,
    pub inputs: Vec<InputVec>,
    /// Inputs raising the bad output at the last state, for counterexamples.
    pub bad_inputs: Option<InputVec>,
}

impl Trace {
    pub fn single(s: State) -> Trace {
        Trace { states: alloc::vec![s], inputs: Vec::new(), bad_inputs: None }
    }

    /// Number of transitions.
    pub fn steps(&self) -> usize {
        self.inputs.len()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("traces are non-empty")
    }
}

/// An inductive invariant: the clauses, conjoined with the property when
/// `includes_property` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariant {
    pub clauses: Vec<Clause>,
    pub includes_property: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    FrameLimit(usize),
    Interrupted,
    Budget,
    IterationCap(usize),
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::FrameLimit(k) => write!(f, "frame limit reached at frame {k}"),
            UnknownReason::Interrupted => f.write_str("interrupted"),
            UnknownReason::Budget => f.write_str("solver budget exhausted"),
            UnknownReason::IterationCap(n) => write!(f, "decomposition iteration cap {n} reached"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `frames` is the index of the top frame when the fixed point was found.
    Safe { invariant: Invariant, frames: usize },
    Unsafe { trace: Trace },
    Unknown { reason: UnknownReason },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Safe { .. } => "SAFE",
            Verdict::Unsafe { .. } => "UNSAFE",
            Verdict::Unknown { .. } => "UNKNOWN",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicBudget {
    /// Conflicts allowed per condition-fixing attempt.
    pub conflicts: NonZeroU64,
    /// Unpushability proofs per frame before falling back to plain pushing.
    pub unpush_per_frame: NonZeroUsize,
}

impl Default for HeuristicBudget {
    fn default() -> Self {
        HeuristicBudget {
            conflicts: NonZeroU64::new(10_000).unwrap(),
            unpush_per_frame: NonZeroUsize::new(3).unwrap(),
        }
    }
}

/// How hard the pushing phase works to fix broken pushing conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EffortMode {
    /// Stop fixing at the first unpushable clause of the top frame.
    Minimal,
    /// Fix every clause, including clauses added below the top frame.
    Maximal,
    Heuristic(HeuristicBudget),
}

impl EffortMode {
    pub fn name(&self) -> &'static str {
        match self {
            EffortMode::Minimal => "minimal",
            EffortMode::Maximal => "maximal",
            EffortMode::Heuristic(_) => "heuristic",
        }
    }
}

/// Polled between solver calls; returning true stops the run.
pub type Interrupt = Arc<dyn Fn() -> bool + Send + Sync>;

#[derive(Clone)]
pub struct Options {
    pub seed: u64,
    pub max_frames: Option<usize>,
    pub interrupt: Option<Interrupt>,
    /// Consult stored reachable states before blocking pushing witnesses.
    pub reuse: bool,
    /// Shrink predecessor states by unsat cores of the transition query.
    pub lifting: bool,
    /// Re-verify lemma insertions and store soundness with extra SAT calls.
    pub self_check: bool,
    pub solver: SolverFactory,
    /// Outer-loop cap for decomposition; defaults to `2 · 2^latches`.
    pub pd_iteration_cap: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 0,
            max_frames: None,
            interrupt: None,
            reuse: true,
            lifting: true,
            self_check: cfg!(debug_assertions),
            solver: bundled_factory(),
            pd_iteration_cap: None,
        }
    }
}

impl fmt::Debug for Options {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Options")
            .field("seed", &self.seed)
            .field("max_frames", &self.max_frames)
            .field("reuse", &self.reuse)
            .field("lifting", &self.lifting)
            .field("self_check", &self.self_check)
            .field("pd_iteration_cap", &self.pd_iteration_cap)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Stop {
    Budget,
    Interrupted,
}

impl From<Stop> for UnknownReason {
    fn from(s: Stop) -> Self {
        match s {
            Stop::Budget => UnknownReason::Budget,
            Stop::Interrupted => UnknownReason::Interrupted,
        }
    }
}

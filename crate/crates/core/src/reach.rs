//! Store of concrete reachable states with predecessor links.
//!
//! Every entry is either the seeded initial state (depth 0) or the
//! successor of another entry under a recorded input, so each entry carries
//! a replayable path of exactly `depth` transitions.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::logic::{Clause, InputVec, State};
use crate::ts::TransitionSystem;
use crate::verdict::Trace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub state: State,
    pub depth: usize,
    pub pred: Option<usize>,
    /// Input on the transition from `pred`.
    pub input: InputVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReachError {
    EmptyTrace,
    NotInitial,
    /// `states[step]` is not the successor of `states[step - 1]`.
    BadStep { step: usize },
}

impl fmt::Display for ReachError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReachError::EmptyTrace => f.write_str("empty trace"),
            ReachError::NotInitial => f.write_str("trace does not start in the initial state"),
            ReachError::BadStep { step } => write!(f, "trace step {step} does not follow the transition relation"),
        }
    }
}

impl core::error::Error for ReachError {}

#[derive(Clone, Debug, Default)]
pub struct ReachStore {
    entries: Vec<Entry>,
    index: BTreeMap<State, usize>,
    seeded: usize,
}

impl ReachStore {
    /// A store holding only the initial state.
    pub fn new(ts: &TransitionSystem) -> ReachStore {
        let mut r = ReachStore::default();
        let init = ts.init_state().clone();
        r.index.insert(init.clone(), 0);
        r.entries.push(Entry { state: init, depth: 0, pred: None, input: Vec::new() });
        r.seeded = 1;
        r
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// States added beyond the seeded initial state.
    pub fn generated(&self) -> usize {
        self.entries.len() - self.seeded
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn get(&self, idx: usize) -> &Entry {
        &self.entries[idx]
    }

    pub fn covers(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// A stored state of depth at most `max_depth` that falsifies the
    /// clause, preferring the shallowest.
    pub fn falsifying(&self, clause: &Clause, max_depth: usize) -> Option<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.depth <= max_depth && e.state.satisfies(clause) == Ok(false))
            .min_by_key(|(_, e)| e.depth)
            .map(|(i, _)| i)
    }

    /// Validates a trace from the initial state and stores its states.
    /// Returns the entry of the last state.
    pub fn record(&mut self, ts: &TransitionSystem, trace: &Trace) -> Result<usize, ReachError> {
        let first = trace.states.first().ok_or(ReachError::EmptyTrace)?;
        if first != ts.init_state() {
            return Err(ReachError::NotInitial);
        }
        for (j, x) in trace.inputs.iter().enumerate() {
            if trace.states.get(j + 1) != Some(&ts.step(&trace.states[j], x)) {
                return Err(ReachError::BadStep { step: j + 1 });
            }
        }
        if trace.states.len() != trace.inputs.len() + 1 {
            return Err(ReachError::BadStep { step: trace.states.len().min(trace.inputs.len() + 1) });
        }
        let mut cur = self.insert(first.clone(), None, Vec::new());
        for (s, x) in trace.states[1..].iter().zip(&trace.inputs) {
            cur = self.insert(s.clone(), Some(cur), x.clone());
        }
        Ok(cur)
    }

    fn insert(&mut self, state: State, pred: Option<usize>, input: InputVec) -> usize {
        if let Some(&i) = self.index.get(&state) {
            return i;
        }
        let depth = pred.map_or(0, |p| self.entries[p].depth + 1);
        let i = self.entries.len();
        self.index.insert(state.clone(), i);
        self.entries.push(Entry { state, depth, pred, input });
        i
    }

    /// Path from the initial state to the entry.
    pub fn trace_to(&self, idx: usize) -> Trace {
        let mut states = Vec::new();
        let mut inputs = Vec::new();
        let mut cur = Some(idx);
        while let Some(i) = cur {
            let e = &self.entries[i];
            states.push(e.state.clone());
            if e.pred.is_some() {
                inputs.push(e.input.clone());
            }
            cur = e.pred;
        }
        states.reverse();
        inputs.reverse();
        Trace { states, inputs, bad_inputs: None }
    }
}

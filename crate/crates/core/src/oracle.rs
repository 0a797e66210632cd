//! Explicit-state ground truth by breadth-first search over bit-packed
//! states. Shares no code with the SAT engines beyond circuit evaluation.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::certify::{certify, Assumed, CertError, Target};
use crate::logic::{InputVec, State};
use crate::sat::SolverFactory;
use crate::ts::TransitionSystem;
use crate::verdict::{Invariant, Trace};

pub const DEFAULT_MAX_STATES: usize = 1 << 20;
const MAX_INPUTS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    TooManyLatches(usize),
    TooManyInputs(usize),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooManyLatches(n) => write!(f, "{n} latches do not fit a 64-bit state"),
            OracleError::TooManyInputs(n) => write!(f, "{n} inputs are too many to enumerate"),
        }
    }
}

impl core::error::Error for OracleError {}

#[derive(Clone, Debug)]
pub struct ReachMap {
    num_latches: usize,
    /// Packed state to (BFS depth, parent, input index from parent).
    depth: BTreeMap<u64, (usize, u64, u64)>,
    pub diameter: usize,
    pub truncated: bool,
    /// Shallowest bad state found, with its bad input.
    bad: Option<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Safe,
    Unsafe { depth: usize },
    Inconclusive,
}

fn input_vec(bits: u64, n: usize) -> InputVec {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}

/// Reachable states in BFS order, stopping after `max_states`.
pub fn bfs(ts: &TransitionSystem, max_states: usize) -> Result<ReachMap, OracleError> {
    let nl = ts.num_latches();
    let ni = ts.num_inputs();
    if nl > 64 {
        return Err(OracleError::TooManyLatches(nl));
    }
    if ni > MAX_INPUTS {
        return Err(OracleError::TooManyInputs(ni));
    }
    let c = ts.circuit();
    let init = ts.init_state().to_bits();
    let mut depth = BTreeMap::new();
    depth.insert(init, (0, init, 0));
    let mut frontier = alloc::vec![init];
    let mut d = 0;
    let mut truncated = false;
    let mut bad = None;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &s in &frontier {
            let st = State::from_bits(s, nl);
            for x in 0..1u64 << ni {
                let xv = input_vec(x, ni);
                let ev = c.evaluate(&st, &xv);
                if bad.is_none() && ev.value(c.bad) {
                    bad = Some((s, x));
                }
                let succ = c.latches.iter().enumerate().fold(0u64, |acc, (i, l)| {
                    acc | (ev.value(l.next) as u64) << i
                });
                if depth.contains_key(&succ) {
                    continue;
                }
                if depth.len() >= max_states {
                    truncated = true;
                    continue;
                }
                depth.insert(succ, (d + 1, s, x));
                next.push(succ);
            }
        }
        if !next.is_empty() {
            d += 1;
        }
        frontier = next;
    }
    Ok(ReachMap { num_latches: nl, depth, diameter: d, truncated, bad })
}

impl ReachMap {
    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    pub fn depth(&self, s: &State) -> Option<usize> {
        self.depth.get(&s.to_bits()).map(|e| e.0)
    }

    pub fn contains(&self, s: &State) -> bool {
        self.depth.contains_key(&s.to_bits())
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        self.depth.keys().map(|&b| State::from_bits(b, self.num_latches))
    }

    /// Number of reachable states per BFS depth.
    pub fn depth_histogram(&self) -> Vec<usize> {
        let mut h = alloc::vec![0; self.diameter + 1];
        for &(d, _, _) in self.depth.values() {
            h[d] += 1;
        }
        h
    }

    /// Shortest path to `s`.
    pub fn path_to(&self, ts: &TransitionSystem, s: &State) -> Option<Trace> {
        let mut cur = s.to_bits();
        let (d, _, _) = *self.depth.get(&cur)?;
        let mut states = alloc::vec![cur];
        let mut inputs = Vec::new();
        for _ in 0..d {
            let (_, p, x) = self.depth[&cur];
            inputs.push(input_vec(x, ts.num_inputs()));
            states.push(p);
            cur = p;
        }
        states.reverse();
        inputs.reverse();
        Some(Trace {
            states: states.into_iter().map(|b| State::from_bits(b, self.num_latches)).collect(),
            inputs,
            bad_inputs: None,
        })
    }

    /// Shortest counterexample, if a bad state was reached.
    pub fn counterexample(&self, ts: &TransitionSystem) -> Option<Trace> {
        let mut best: Option<(usize, u64)> = None;
        for (&s, &(d, _, _)) in &self.depth {
            if best.is_some_and(|(bd, _)| bd <= d) {
                continue;
            }
            if ts.bad_input(&State::from_bits(s, self.num_latches)).is_some() {
                best = Some((d, s));
            }
        }
        let (_, s) = best?;
        let st = State::from_bits(s, self.num_latches);
        let mut t = self.path_to(ts, &st)?;
        if ts.circuit().bad_reads_inputs() {
            t.bad_inputs = ts.bad_input(&st);
        }
        Some(t)
    }
}

pub fn oracle_verdict(ts: &TransitionSystem, rm: &ReachMap) -> OracleVerdict {
    match rm.bad {
        Some((s, _)) => {
            // BFS visits in depth order, but a shallower bad state may sit
            // later in the same layer; take the minimum.
            let d = rm
                .depth
                .iter()
                .filter(|(&b, _)| ts.bad_input(&State::from_bits(b, rm.num_latches)).is_some())
                .map(|(_, e)| e.0)
                .min()
                .unwrap_or(rm.depth[&s].0);
            OracleVerdict::Unsafe { depth: d }
        }
        None if rm.truncated => OracleVerdict::Inconclusive,
        None => OracleVerdict::Safe,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceError {
    Empty,
    /// `states[step]` is wrong: not initial for step 0, otherwise not the
    /// successor of the previous state.
    Step { step: usize },
    LengthMismatch,
    NotBad,
}

impl fmt::Display for TraceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceError::Empty => f.write_str("empty trace"),
            TraceError::Step { step: 0 } => f.write_str("trace does not start in the initial state"),
            TraceError::Step { step } => write!(f, "state {step} is not the successor of state {}", step - 1),
            TraceError::LengthMismatch => f.write_str("one input vector per transition expected"),
            TraceError::NotBad => f.write_str("last state does not raise the bad output"),
        }
    }
}

impl core::error::Error for TraceError {}

/// Replays the trace by circuit evaluation.
pub fn validate_trace(ts: &TransitionSystem, t: &Trace) -> Result<(), TraceError> {
    let first = t.states.first().ok_or(TraceError::Empty)?;
    if first != ts.init_state() {
        return Err(TraceError::Step { step: 0 });
    }
    if t.inputs.len() + 1 != t.states.len() {
        return Err(TraceError::LengthMismatch);
    }
    for (j, x) in t.inputs.iter().enumerate() {
        if ts.step(&t.states[j], x) != t.states[j + 1] {
            return Err(TraceError::Step { step: j + 1 });
        }
    }
    Ok(())
}

/// A valid trace whose last state is bad under `bad_inputs` (or under some
/// input when none are given).
pub fn validate_counterexample(ts: &TransitionSystem, t: &Trace) -> Result<(), TraceError> {
    validate_trace(ts, t)?;
    let bad = match &t.bad_inputs {
        Some(x) => ts.is_bad(t.last(), x),
        None => ts.bad_input(t.last()).is_some(),
    };
    if bad {
        Ok(())
    } else {
        Err(TraceError::NotBad)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantError {
    /// A reachable state violates the invariant.
    ExcludesReachable(State),
    Certificate(CertError),
}

impl fmt::Display for InvariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantError::ExcludesReachable(s) => write!(f, "reachable state {s} violates the invariant"),
            InvariantError::Certificate(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for InvariantError {}

/// Explicit check that every reachable state satisfies the invariant, plus
/// a SAT check of initiation, consecution and safety.
pub fn check_invariant(
    ts: &TransitionSystem,
    inv: &Invariant,
    rm: &ReachMap,
    factory: &SolverFactory,
) -> Result<(), InvariantError> {
    for s in rm.states() {
        let ok = s.satisfies_all(&inv.clauses) && (!inv.includes_property || ts.satisfies_prop(&s));
        if !ok {
            return Err(InvariantError::ExcludesReachable(s));
        }
    }
    certify(ts, inv, Assumed::default(), Target::Property, factory, 0)
        .map(|_| ())
        .map_err(InvariantError::Certificate)
}

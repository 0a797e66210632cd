//! HWMCC-style witnesses and stimulus traces.
//!
//! Layout: `1`, `b0`, one line of latch reset bits, then one line of input
//! bits per transition, then `.`. When the bad output reads primary inputs
//! one more input line follows the last transition: the inputs that raise
//! bad in the final state.

use ic4_core::logic::State;
use ic4_core::oracle::{validate_counterexample, TraceError};
use ic4_core::reach::ReachStore;
use ic4_core::ts::TransitionSystem;
use ic4_core::Trace;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub reset: Vec<bool>,
    pub inputs: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("line {0}: expected `{1}`")]
    Expected(usize, &'static str),
    #[error("line {0}: expected {1} bits")]
    Width(usize, usize),
    #[error("line {0}: `{1}` is not a bit")]
    Bit(usize, char),
    #[error("missing terminating `.`")]
    Unterminated,
    #[error("reset line differs from the initial state")]
    Reset,
    #[error("replay: {0}")]
    Replay(#[from] TraceError),
}

fn bits(s: &mut String, v: &[bool]) {
    s.extend(v.iter().map(|&b| if b { '1' } else { '0' }));
    s.push('\n');
}

fn stimulus(s: &mut String, t: &Trace, with_bad: bool) {
    bits(s, t.states[0].bits());
    for x in &t.inputs {
        bits(s, x);
    }
    if with_bad {
        if let Some(x) = &t.bad_inputs {
            bits(s, x);
        }
    }
    s.push_str(".\n");
}

pub fn write_witness(ts: &TransitionSystem, t: &Trace) -> String {
    let mut s = String::from("1\nb0\n");
    stimulus(&mut s, t, ts.circuit().bad_reads_inputs());
    s
}

/// Stimulus blocks (reset line, input lines, `.`) for every state the
/// store learned beyond the initial one, in discovery order.
pub fn write_traces(reach: &ReachStore) -> String {
    let mut s = String::new();
    for (i, e) in reach.entries().iter().enumerate() {
        if e.depth == 0 {
            continue;
        }
        stimulus(&mut s, &reach.trace_to(i), false);
    }
    s
}

fn parse_bits(line: &str, n: usize, no: usize) -> Result<Vec<bool>, WitnessError> {
    let line = line.trim_end();
    if line.chars().count() != n {
        return Err(WitnessError::Width(no, n));
    }
    line.chars()
        .map(|c| match c {
            '0' | 'x' => Ok(false),
            '1' => Ok(true),
            c => Err(WitnessError::Bit(no, c)),
        })
        .collect()
}

pub fn parse_witness(text: &str, num_latches: usize, num_inputs: usize) -> Result<Witness, WitnessError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.starts_with('c'));
    match lines.next() {
        Some((_, "1")) => {}
        Some((n, _)) => return Err(WitnessError::Expected(n, "1")),
        None => return Err(WitnessError::Expected(1, "1")),
    }
    match lines.next() {
        Some((_, l)) if l.trim() == "b0" => {}
        Some((n, _)) => return Err(WitnessError::Expected(n, "b0")),
        None => return Err(WitnessError::Expected(2, "b0")),
    }
    let (n, l) = lines.next().ok_or(WitnessError::Unterminated)?;
    let reset = parse_bits(l, num_latches, n)?;
    let mut inputs = Vec::new();
    for (n, l) in lines {
        if l.trim() == "." {
            return Ok(Witness { reset, inputs });
        }
        inputs.push(parse_bits(l, num_inputs, n)?);
    }
    Err(WitnessError::Unterminated)
}

/// Replays a witness on `ts` and checks that it ends in a bad state.
pub fn replay(ts: &TransitionSystem, w: &Witness) -> Result<Trace, WitnessError> {
    let s0 = State::new(w.reset.clone());
    if &s0 != ts.init_state() {
        return Err(WitnessError::Reset);
    }
    let mut steps = w.inputs.clone();
    let bad_inputs = if ts.circuit().bad_reads_inputs() { steps.pop() } else { None };
    let mut states = vec![s0];
    for x in &steps {
        let next = ts.step(states.last().expect("non-empty"), x);
        states.push(next);
    }
    let t = Trace { states, inputs: steps, bad_inputs };
    validate_counterexample(ts, &t)?;
    Ok(t)
}

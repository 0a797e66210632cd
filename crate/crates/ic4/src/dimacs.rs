//! DIMACS output for transition systems and invariant certificates, and a
//! small reader for the latter.

use std::fmt::Write as _;

use ic4_core::logic::{Clause, Lit, Var};
use ic4_core::ts::{BadSignal, Copy, TransitionSystem, VarOrigin};
use ic4_core::Invariant;
use thiserror::Error;

fn copy_name(c: Copy) -> &'static str {
    match c {
        Copy::Transition => "transition",
        Copy::PropertyCurrent => "property current",
        Copy::PropertyNext => "property next",
    }
}

pub fn describe_var(ts: &TransitionSystem, v: Var) -> String {
    match ts.var_info(v).origin {
        VarOrigin::LatchCurrent(i) => format!("latch {i} current"),
        VarOrigin::LatchNext(i) => format!("latch {i} next"),
        VarOrigin::Input { index, copy } => format!("input {index} ({} copy)", copy_name(copy)),
        VarOrigin::Gate { aig_var, copy } => format!("gate {aig_var} ({} copy)", copy_name(copy)),
    }
}

fn push_clause(s: &mut String, lits: &[Lit]) {
    for l in lits {
        let _ = write!(s, "{} ", l.to_dimacs());
    }
    s.push_str("0\n");
}

/// The CNF of `ts`: init units, transition clauses, the current-state bad
/// cone, and `bad` as a final unit so the file is satisfiable exactly when
/// an initial state is bad.
pub fn write_ts(ts: &TransitionSystem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "c model {}", ts.name);
    for i in 0..ts.num_vars() {
        let v = Var(i as u32);
        let _ = writeln!(s, "c var {} = {}", i + 1, describe_var(ts, v));
    }
    let bad_unit = match ts.bad() {
        BadSignal::Lit(b) => {
            let _ = writeln!(s, "c bad = {}", b.to_dimacs());
            Some(vec![b])
        }
        BadSignal::Never => {
            s.push_str("c bad = false\n");
            Some(vec![])
        }
        BadSignal::Always => {
            s.push_str("c bad = true\n");
            None
        }
    };
    let n = ts.init().len() + ts.trans().len() + ts.prop_defs().len() + bad_unit.is_some() as usize;
    let _ = writeln!(s, "p cnf {} {n}", ts.num_vars());
    for c in ts.init().iter().chain(ts.trans()).chain(ts.prop_defs()) {
        push_clause(&mut s, c.lits());
    }
    if let Some(u) = bad_unit {
        push_clause(&mut s, &u);
    }
    s
}

/// An invariant over the latches: latch `i` is DIMACS variable `i + 1`.
/// When the invariant is conjoined with a property that is not a clause
/// over latches, a comment says so.
pub fn write_invariant(ts: &TransitionSystem, inv: &Invariant, engine: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "c inductive invariant for model {}", ts.name);
    let _ = writeln!(s, "c engine {engine}");
    for i in 0..ts.num_latches() {
        let _ = writeln!(s, "c var {} = latch {i}", i + 1);
    }
    let mut clauses: Vec<&Clause> = inv.clauses.iter().collect();
    let prop = ts.prop_as_state_clause();
    if inv.includes_property {
        match &prop {
            Some(p) if !clauses.contains(&p) => clauses.push(p),
            Some(_) => {}
            None => s.push_str("c conjoined with the property (no input raises bad)\n"),
        }
    }
    let _ = writeln!(s, "p cnf {} {}", ts.num_latches(), clauses.len());
    for c in clauses {
        push_clause(&mut s, c.lits());
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {0}: missing or malformed `p cnf` header")]
    Header(usize),
    #[error("line {0}: bad literal `{1}`")]
    Literal(usize, String),
    #[error("line {0}: variable {1} exceeds the declared {2}")]
    Range(usize, u64, usize),
    #[error("clause count {found} differs from the declared {declared}")]
    Count { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut num_vars = None;
    let mut declared = 0;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p cnf") {
            let nums: Vec<usize> = rest.split_whitespace().filter_map(|x| x.parse().ok()).collect();
            if num_vars.is_some() || nums.len() != 2 {
                return Err(DimacsError::Header(i + 1));
            }
            num_vars = Some(nums[0]);
            declared = nums[1];
            continue;
        }
        let nv = num_vars.ok_or(DimacsError::Header(i + 1))?;
        for tok in line.split_whitespace() {
            let d: i64 = tok.parse().map_err(|_| DimacsError::Literal(i + 1, tok.to_string()))?;
            if d == 0 {
                clauses.push(std::mem::take(&mut cur));
                continue;
            }
            if d.unsigned_abs() > nv as u64 {
                return Err(DimacsError::Range(i + 1, d.unsigned_abs(), nv));
            }
            cur.push(Lit::from_dimacs(d).ok_or_else(|| DimacsError::Literal(i + 1, tok.to_string()))?);
        }
    }
    let num_vars = num_vars.ok_or(DimacsError::Header(text.lines().count() + 1))?;
    if !cur.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if clauses.len() != declared {
        return Err(DimacsError::Count { declared, found: clauses.len() });
    }
    Ok(Cnf { num_vars, clauses })
}

/// Reads an invariant certificate back as latch clauses.
pub fn read_invariant(text: &str) -> Result<Invariant, DimacsError> {
    let cnf = parse_dimacs(text)?;
    let includes_property = text.lines().any(|l| l.starts_with("c conjoined with the property"));
    let clauses = cnf
        .clauses
        .into_iter()
        .map(|c| Clause::new(c).expect("non-tautological certificate clause"))
        .collect();
    Ok(Invariant { clauses, includes_property })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ic4_core::fixtures::{stuck, sat3};

    #[test]
    fn ts_dump_names_every_var() {
        let ts = TransitionSystem::encode(&sat3(), "sat3");
        let text = write_ts(&ts);
        assert!(text.contains("c var 1 = latch 0 current"));
        assert!(text.contains(&format!("c var {} = latch 1 next", 2 + 2)));
        let cnf = parse_dimacs(&text).unwrap();
        assert_eq!(cnf.num_vars, ts.num_vars());
    }

    #[test]
    fn invariant_round_trip() {
        let ts = TransitionSystem::encode(&stuck(), "stuck");
        let inv = Invariant { clauses: vec![Clause::unit(Var(0).lit(false))], includes_property: true };
        let text = write_invariant(&ts, &inv, "ic4-min");
        assert!(text.lines().any(|l| l == "-1 0"));
        let back = read_invariant(&text).unwrap();
        assert_eq!(back.clauses, inv.clauses);
    }

    #[test]
    fn malformed_dimacs() {
        assert_eq!(parse_dimacs("1 0\n"), Err(DimacsError::Header(1)));
        assert_eq!(parse_dimacs("p cnf 1 1\n2 0\n"), Err(DimacsError::Range(2, 2, 1)));
        assert_eq!(parse_dimacs("p cnf 1 1\n1\n"), Err(DimacsError::Unterminated));
        assert_eq!(parse_dimacs("p cnf 1 2\n1 0\n"), Err(DimacsError::Count { declared: 2, found: 1 }));
    }
}

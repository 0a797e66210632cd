//! SAT re-check of an inductive invariant, independent of the frames that
//! produced it.

use alloc::vec::Vec;
use core::fmt;

use crate::logic::{Clause, Lit};
use crate::sat::{SatResult, SolverFactory, SolverHandle};
use crate::ts::{BadSignal, TransitionSystem};
use crate::verdict::Invariant;

/// What the invariant must imply.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Property,
    Clause(&'a Clause),
}

/// Extra facts assumed on the current state during consecution.
#[derive(Clone, Copy, Debug, Default)]
pub struct Assumed<'a> {
    pub clauses: &'a [Clause],
    /// Assume some input leaves bad low at the current state.
    pub weak_property: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertError {
    Initiation(Clause),
    InitiationProperty,
    Consecution(Clause),
    ConsecutionProperty,
    Safety,
}

impl fmt::Display for CertError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertError::Initiation(c) => write!(f, "initial state violates clause {c}"),
            CertError::InitiationProperty => f.write_str("initial state violates the property"),
            CertError::Consecution(c) => write!(f, "clause {c} is not preserved by a transition"),
            CertError::ConsecutionProperty => f.write_str("property is not preserved by a transition"),
            CertError::Safety => f.write_str("invariant does not imply the target"),
        }
    }
}

impl core::error::Error for CertError {}

fn unsat(h: &mut SolverHandle, assumptions: &[Lit]) -> bool {
    matches!(h.solve(assumptions), Ok(SatResult::Unsat(_)))
}

/// Checks `I → Inv`, `Inv ∧ A ∧ T → Inv′` and `Inv → target`. Returns the
/// number of SAT calls made.
pub fn certify(
    ts: &TransitionSystem,
    inv: &Invariant,
    assumed: Assumed<'_>,
    target: Target<'_>,
    factory: &SolverFactory,
    seed: u64,
) -> Result<u64, CertError> {
    let mut calls = 0;
    let with_p = inv.includes_property && ts.bad() != BadSignal::Never;

    let mut init = SolverHandle::new(factory, seed, ts.num_vars());
    for c in ts.init().iter().chain(ts.prop_defs()) {
        init.add_clause(c, None);
    }
    for c in &inv.clauses {
        calls += 1;
        let neg: Vec<Lit> = c.lits().iter().map(|&l| !l).collect();
        if !unsat(&mut init, &neg) {
            return Err(CertError::Initiation(c.clone()));
        }
    }
    if with_p {
        calls += 1;
        let ok = match ts.bad() {
            BadSignal::Lit(b) => unsat(&mut init, &[b]),
            _ => false,
        };
        if !ok {
            return Err(CertError::InitiationProperty);
        }
    }

    let mut step = SolverHandle::new(factory, seed, ts.num_vars());
    for c in ts.trans().iter().chain(ts.prop_defs()).chain(&inv.clauses).chain(assumed.clauses) {
        step.add_clause(c, None);
    }
    if with_p || assumed.weak_property {
        match ts.bad() {
            BadSignal::Lit(b) => step.add_lits(&[!b], None),
            BadSignal::Always => step.add_clause(&Clause::empty(), None),
            BadSignal::Never => {}
        }
    }
    for c in &inv.clauses {
        calls += 1;
        let neg: Vec<Lit> = c.lits().iter().map(|&l| !ts.prime_lit(l)).collect();
        if !unsat(&mut step, &neg) {
            return Err(CertError::Consecution(c.clone()));
        }
    }
    if with_p {
        calls += 1;
        let ok = match ts.bad_next() {
            BadSignal::Lit(b) => unsat(&mut step, &[b]),
            BadSignal::Never => true,
            BadSignal::Always => unsat(&mut step, &[]),
        };
        if !ok {
            return Err(CertError::ConsecutionProperty);
        }
    }

    let mut safe = SolverHandle::new(factory, seed, ts.num_vars());
    for c in ts.prop_defs().iter().chain(&inv.clauses) {
        safe.add_clause(c, None);
    }
    let ok = match target {
        Target::Property if with_p => true,
        Target::Property => match ts.bad() {
            BadSignal::Never => true,
            BadSignal::Always => {
                calls += 1;
                unsat(&mut safe, &[])
            }
            BadSignal::Lit(b) => {
                calls += 1;
                unsat(&mut safe, &[b])
            }
        },
        Target::Clause(q) => {
            calls += 1;
            let neg: Vec<Lit> = q.lits().iter().map(|&l| !l).collect();
            unsat(&mut safe, &neg)
        }
    };
    if !ok {
        return Err(CertError::Safety);
    }
    Ok(calls)
}

//! Property decomposition: the global invariant is built as a conjunction
//! of local invariants, each excluding one concrete bad state under the
//! invariants found so far.

use alloc::vec;
use alloc::vec::Vec;

use crate::certify::{certify, Assumed, Target};
use crate::engine::{Engine, Goal};
use crate::logic::{Clause, State};
use crate::oracle::validate_counterexample;
use crate::reach::ReachStore;
use crate::run::RunResult;
use crate::sat::{SatResult, SolverHandle};
use crate::stats::{PdStats, Stats};
use crate::ts::{BadSignal, TransitionSystem};
use crate::verdict::{EffortMode, Invariant, Options, UnknownReason, Verdict};

/// Drops literals of `q` while the clause keeps the initial state, keeps
/// every stored reachable state and stays inductive relative to
/// `inv ∧ P`. Returns the clause and the SAT calls spent.
pub(crate) fn strengthen_q(
    ts: &TransitionSystem,
    opts: &Options,
    inv: &[Clause],
    q: &Clause,
    reach: &ReachStore,
) -> (Clause, u64) {
    let mut h = SolverHandle::new(&opts.solver, opts.seed, ts.num_vars());
    for c in ts.trans().iter().chain(ts.prop_defs()).chain(inv) {
        h.add_clause(c, None);
    }
    match ts.bad() {
        BadSignal::Lit(b) => h.add_lits(&[!b], None),
        BadSignal::Always => h.add_clause(&Clause::empty(), None),
        BadSignal::Never => {}
    }
    let mut cur = q.clone();
    let mut calls = 0;
    for &l in q.lits() {
        if cur.len() <= 1 {
            break;
        }
        let cand = Clause::new(cur.lits().iter().copied().filter(|&x| x != l)).expect("subclause");
        if ts.init_state().satisfies(&cand) != Ok(true)
            || reach.entries().iter().any(|e| e.state.satisfies(&cand) == Ok(false))
        {
            continue;
        }
        let g = h.add_temporary(cand.lits());
        let mut a = vec![g];
        a.extend(cand.lits().iter().map(|&x| !ts.prime_lit(x)));
        calls += 1;
        let r = h.solve(&a);
        h.release(g);
        if matches!(r, Ok(SatResult::Unsat(_))) {
            cur = cand;
        }
    }
    (cur, calls)
}

/// The longest clause falsified by `s`: `s` is the only state outside it.
pub fn form_q(s: &State) -> Clause {
    s.to_cube().negate()
}

fn default_cap(ts: &TransitionSystem) -> usize {
    1usize
        .checked_shl(ts.num_latches() as u32)
        .filter(|&n| n > 0)
        .map_or(usize::MAX, |n| n.saturating_mul(2))
}

pub fn prove_pd(ts: &TransitionSystem, mode: EffortMode, opts: &Options) -> RunResult {
    let mut reach = ReachStore::new(ts);
    let mut stats = Stats::new("ic4-pd", Some(mode.name()));
    let mut pd = PdStats::default();
    let mut proofs = Vec::new();
    let mut inv: Vec<Clause> = Vec::new();
    let mut top = SolverHandle::new(&opts.solver, opts.seed, ts.num_vars());
    for c in ts.prop_defs() {
        top.add_clause(c, None);
    }
    let cap = opts.pd_iteration_cap.unwrap_or_else(|| default_cap(ts));
    let bad: Vec<_> = match ts.bad() {
        BadSignal::Lit(b) => vec![b],
        _ => Vec::new(),
    };
    let mut iterations = 0;
    let verdict = loop {
        if ts.bad() == BadSignal::Never {
            break None;
        }
        if opts.interrupt.as_ref().is_some_and(|f| f()) {
            break Some(Verdict::Unknown { reason: UnknownReason::Interrupted });
        }
        if iterations >= cap {
            break Some(Verdict::Unknown { reason: UnknownReason::IterationCap(cap) });
        }
        iterations += 1;
        stats.sat_calls.bad += 1;
        let s = match top.solve(&bad) {
            Ok(SatResult::Sat(m)) => ts.current_state(&m),
            _ => break None,
        };
        pd.q_generated += 1;
        let q = form_q(&s);

        let mut local = Engine::build(ts, opts, Some(mode), Goal::Avoid(s.clone()), inv.clone(), &mut reach);
        let v = local.run();
        let ls = local.stats().clone();
        proofs.extend(local.proofs().iter().cloned());
        drop(local);
        stats.sat_calls.absorb(&ls.sat_calls);
        stats.obligations += ls.obligations;
        stats.lemmas += ls.lemmas;
        stats.unpushable += ls.unpushable;
        stats.reuse_hits += ls.reuse_hits;
        if ls.frames >= stats.frames {
            stats.frames = ls.frames;
            stats.clauses_per_frame = ls.clauses_per_frame;
        }

        let j = match v {
            Verdict::Safe { invariant, .. } => invariant.clauses,
            Verdict::Unsafe { trace } => {
                if let Err(e) = validate_counterexample(ts, &trace) {
                    panic!("decomposition counterexample fails replay: {e}");
                }
                break Some(Verdict::Unsafe { trace });
            }
            unknown => break Some(unknown),
        };
        let j = if j == [q.clone()] {
            pd.q_inductive_as_is += 1;
            let (q2, calls) = strengthen_q(ts, opts, &inv, &q, &reach);
            stats.sat_calls.generalize += calls;
            pd.literals_removed += q.len() - q2.len();
            vec![q2]
        } else {
            j
        };
        for c in j {
            if !inv.contains(&c) {
                top.add_clause(&c, None);
                inv.push(c);
            }
        }
        let excluded = matches!(top.solve(s.to_cube().lits()), Ok(SatResult::Unsat(_)));
        assert!(excluded, "new local invariant does not exclude state {s}");
    };
    let verdict = verdict.unwrap_or_else(|| {
        inv.sort();
        let invariant = Invariant { clauses: inv, includes_property: false };
        match certify(ts, &invariant, Assumed::default(), Target::Property, &opts.solver, opts.seed) {
            Ok(calls) => stats.sat_calls.certify += calls,
            Err(e) => panic!("decomposition invariant fails certification: {e}"),
        }
        Verdict::Safe { invariant, frames: stats.frames }
    });
    stats.reach_generated = reach.generated();
    stats.pd = Some(pd);
    RunResult { verdict, stats, reach, proofs }
}

//! Small hand-checked scenarios for the engine operations.

use ic4_core::aig::AigLit;
use ic4_core::engine::{BlockOutcome, Engine, Pushing};
use ic4_core::fixtures::{cnt4, sat3, state_of, stuck};
use ic4_core::logic::{Clause, Var};
use ic4_core::oracle::{bfs, validate_counterexample, validate_trace, DEFAULT_MAX_STATES};
use ic4_core::pd::{form_q, prove_pd};
use ic4_core::reach::ReachStore;
use ic4_core::ts::TransitionSystem;
use ic4_core::{prove_ic3, prove_ic4, EffortMode, HeuristicBudget, Invariant, Options, Verdict};

fn opts() -> Options {
    Options { self_check: true, ..Options::default() }
}

fn clause(lits: &[(u32, bool)]) -> Clause {
    Clause::new(lits.iter().map(|&(v, p)| Var(v).lit(p))).unwrap()
}

fn modes() -> [EffortMode; 3] {
    [EffortMode::Minimal, EffortMode::Maximal, EffortMode::Heuristic(HeuristicBudget::default())]
}

#[test]
fn block_reaches_reachable_state() {
    let ts = TransitionSystem::encode(&cnt4(), "cnt4");
    let mut reach = ReachStore::new(&ts);
    let mut e = Engine::new(&ts, &opts(), None, &mut reach);
    for _ in 0..3 {
        e.open_frame();
    }
    // (l0=0, l1=1) has BFS depth 2
    match e.block(state_of(&[0, 1]).to_cube(), 2).unwrap() {
        BlockOutcome::Reached(t) => {
            assert_eq!(t.states.len(), 3);
            assert_eq!(t.last(), &state_of(&[0, 1]));
            validate_trace(&ts, &t).unwrap();
        }
        BlockOutcome::Blocked => panic!("depth-2 state must be reached at level 2"),
    }
}

#[test]
fn block_excludes_unreachable_state() {
    let ts = TransitionSystem::encode(&sat3(), "sat3");
    let mut reach = ReachStore::new(&ts);
    let mut e = Engine::new(&ts, &opts(), None, &mut reach);
    e.open_frame();
    e.open_frame();
    let bad = state_of(&[0, 1]);
    assert_eq!(e.block(bad.to_cube(), 2).unwrap(), BlockOutcome::Blocked);
    assert!(e.frames().blocks(&bad.to_cube(), 2));
}

#[test]
fn generalize_examples() {
    let ts = TransitionSystem::encode(&stuck(), "stuck");
    let mut reach = ReachStore::new(&ts);
    let mut e = Engine::new(&ts, &opts(), None, &mut reach);
    e.open_frame();
    let g = e.generalize(state_of(&[1]).to_cube(), 1).unwrap();
    assert_eq!(g.negate(), clause(&[(0, false)]));

    let ts = TransitionSystem::encode(&sat3(), "sat3");
    let rm = bfs(&ts, DEFAULT_MAX_STATES).unwrap();
    let mut reach = ReachStore::new(&ts);
    let mut e = Engine::new(&ts, &opts(), None, &mut reach);
    e.open_frame();
    let bad = state_of(&[0, 1]);
    let c = e.generalize(bad.to_cube(), 1).unwrap().negate();
    assert!(c.len() <= 2);
    assert_eq!(bad.satisfies(&c), Ok(false));
    // a level-1 lemma only has to keep states reachable in at most one step
    for s in rm.states().filter(|s| rm.depth(s) <= Some(1)) {
        assert_eq!(s.satisfies(&c), Ok(true), "clause {c} excludes reachable {s}");
    }
}

#[test]
fn pushing_condition_examples() {
    let ts = TransitionSystem::encode(&sat3(), "sat3");
    let mut reach = ReachStore::new(&ts);
    let mut e = Engine::new(&ts, &opts(), None, &mut reach);
    e.open_frame();
    // the unreachable 01 pattern has no predecessor from I
    let c = clause(&[(1, false), (0, true)]);
    assert_eq!(e.check_pushing_condition(&c, 0).unwrap(), Pushing::Holds);

    let ts = TransitionSystem::encode(&cnt4(), "cnt4");
    let mut reach = ReachStore::new(&ts);
    let mut e = Engine::new(&ts, &opts(), None, &mut reach);
    e.open_frame();
    e.open_frame();
    let c = clause(&[(0, false), (1, false)]);
    assert_eq!(e.check_pushing_condition(&c, 0).unwrap(), Pushing::Holds);
    e.insert_lemma(c.clone(), 1);
    assert_eq!(e.check_pushing_condition(&c, 1).unwrap(), Pushing::Fails(state_of(&[1, 1])));
}

#[test]
fn push_standard_examples() {
    let ts = TransitionSystem::encode(&cnt4(), "cnt4");
    let mut reach = ReachStore::new(&ts);
    let mut e = Engine::new(&ts, &opts(), None, &mut reach);
    e.open_frame();
    e.open_frame();
    let c = clause(&[(0, false), (1, false)]);
    e.insert_lemma(c.clone(), 1);
    assert_eq!(e.push_standard(1, 1).unwrap(), None);
    assert!(e.frames().delta_contains(1, &c));
    // empty delta below the top
    e.open_frame();
    assert_eq!(e.push_standard(2, 2).unwrap(), Some(2));
}

/// Counter with the bad output tied low.
fn safe_counter() -> TransitionSystem {
    let mut c = cnt4();
    c.bad = AigLit::FALSE;
    TransitionSystem::encode(&c, "cnt4-safe")
}

#[test]
fn new_push_proves_unpushable_with_trace() {
    let ts = safe_counter();
    let rm = bfs(&ts, DEFAULT_MAX_STATES).unwrap();
    let mut reach = ReachStore::new(&ts);
    let mut e = Engine::new(&ts, &opts(), Some(EffortMode::Minimal), &mut reach);
    e.open_frame();
    // l0 ∨ ¬l1 excludes (0,1), reachable in exactly 2 steps
    let c = clause(&[(0, true), (1, false)]);
    e.insert_lemma(c.clone(), 1);
    e.open_frame();
    assert_eq!(e.new_push(1, EffortMode::Minimal).unwrap(), None);
    let proofs = e.proofs();
    assert_eq!(proofs.len(), 1);
    assert_eq!(proofs[0].clause, c);
    let t = &proofs[0].trace;
    assert_eq!(t.states.len(), 3);
    validate_trace(&ts, t).unwrap();
    assert_eq!(rm.depth(t.last()), Some(2));
    assert_eq!(e.reach().generated(), 2);
}

#[test]
fn new_push_all_pushable_is_invariant() {
    let ts = TransitionSystem::encode(&sat3(), "sat3");
    let mut reach = ReachStore::new(&ts);
    let mut e = Engine::new(&ts, &opts(), Some(EffortMode::Minimal), &mut reach);
    e.open_frame();
    e.insert_lemma(clause(&[(0, true), (1, false)]), 1);
    e.open_frame();
    assert_eq!(e.new_push(1, EffortMode::Minimal).unwrap(), Some(1));
    assert!(e.proofs().is_empty());
}

#[test]
fn store_covers_examples() {
    let ts = TransitionSystem::encode(&stuck(), "stuck");
    let reach = ReachStore::new(&ts);
    let i = reach.covers(&state_of(&[0])).unwrap();
    assert_eq!(reach.get(i).depth, 0);

    let ts = TransitionSystem::encode(&cnt4(), "cnt4");
    let rm = bfs(&ts, DEFAULT_MAX_STATES).unwrap();
    let t = rm.path_to(&ts, &state_of(&[1, 1])).unwrap();
    let mut reach = ReachStore::new(&ts);
    reach.record(&ts, &t).unwrap();
    assert!(reach.covers(&state_of(&[1, 1])).is_some());
    assert_eq!(reach.get(reach.covers(&state_of(&[0, 1])).unwrap()).depth, 2);
}

#[test]
fn modes_agree_on_fixtures() {
    for m in modes() {
        let ts = TransitionSystem::encode(&sat3(), "sat3");
        let r = prove_ic4(&ts, m, &opts());
        assert!(matches!(r.verdict, Verdict::Safe { .. }), "{m:?}");
        let ts = TransitionSystem::encode(&cnt4(), "cnt4");
        let r = prove_ic4(&ts, m, &opts());
        let Verdict::Unsafe { trace } = r.verdict else { panic!("{m:?}") };
        let Verdict::Unsafe { trace: t3 } = prove_ic3(&ts, &opts()).verdict else { panic!() };
        assert_eq!(trace, t3);
    }
}

#[test]
fn safe_run_without_unpushable_generates_nothing() {
    let ts = TransitionSystem::encode(&stuck(), "stuck");
    let r = prove_ic4(&ts, EffortMode::Minimal, &opts());
    assert_eq!(r.stats.unpushable, 0);
    assert_eq!(r.stats.reach_generated, 0);
}

#[test]
fn form_q_examples() {
    assert_eq!(form_q(&state_of(&[1, 1])), clause(&[(0, false), (1, false)]));
    assert_eq!(form_q(&state_of(&[0])), clause(&[(0, true)]));
    assert_ne!(form_q(&state_of(&[1, 0])), form_q(&state_of(&[0, 1])));
}

#[test]
fn decomposition_examples() {
    let mut c = cnt4();
    c.bad = AigLit::FALSE;
    let ts = TransitionSystem::encode(&c, "taut");
    let r = prove_pd(&ts, EffortMode::Minimal, &opts());
    assert_eq!(
        r.verdict,
        Verdict::Safe { invariant: Invariant { clauses: vec![], includes_property: false }, frames: 0 }
    );

    let ts = TransitionSystem::encode(&sat3(), "sat3");
    let rm = bfs(&ts, DEFAULT_MAX_STATES).unwrap();
    let r = prove_pd(&ts, EffortMode::Minimal, &opts());
    let Verdict::Safe { invariant, .. } = r.verdict else { panic!("sat3 must be safe") };
    for s in rm.states() {
        assert!(s.satisfies_all(&invariant.clauses));
    }

    let ts = TransitionSystem::encode(&cnt4(), "cnt4");
    let r = prove_pd(&ts, EffortMode::Minimal, &opts());
    let Verdict::Unsafe { trace } = r.verdict else { panic!("cnt4 must be unsafe") };
    validate_counterexample(&ts, &trace).unwrap();
    let (last, prefix) = trace.states.split_last().unwrap();
    assert!(prefix.iter().all(|s| ts.satisfies_prop(s)));
    assert!(!ts.satisfies_prop(last));
}

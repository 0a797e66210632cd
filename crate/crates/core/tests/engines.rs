use ic4_core::fixtures::{cnt4, sat3, state_of, stuck};
use ic4_core::oracle::{bfs, check_invariant, oracle_verdict, validate_counterexample, OracleVerdict, DEFAULT_MAX_STATES};
use ic4_core::random::{random_circuit, GenParams};
use ic4_core::sat::bundled_factory;
use ic4_core::ts::TransitionSystem;
use ic4_core::{EffortMode, EngineKind, HeuristicBudget, Options, Verdict};

fn engines() -> Vec<EngineKind> {
    vec![
        EngineKind::Ic3,
        EngineKind::Ic4(EffortMode::Minimal),
        EngineKind::Ic4(EffortMode::Maximal),
        EngineKind::Ic4(EffortMode::Heuristic(HeuristicBudget::default())),
        EngineKind::Pd(EffortMode::Minimal),
    ]
}

fn opts() -> Options {
    Options { self_check: true, ..Options::default() }
}

#[test]
fn fixtures_get_expected_verdicts() {
    for e in engines() {
        let ts = TransitionSystem::encode(&stuck(), "stuck");
        match e.run(&ts, &opts()).verdict {
            Verdict::Safe { invariant, frames } => {
                assert!(frames <= 1, "{} stuck frames {frames}", e.name());
                assert!(invariant.clauses.iter().any(|c| c.len() == 1 && !c.lits()[0].is_positive()));
            }
            v => panic!("{} stuck: {v:?}", e.name()),
        }
        let ts = TransitionSystem::encode(&sat3(), "sat3");
        match e.run(&ts, &opts()).verdict {
            Verdict::Safe { frames, .. } => {
                if e != EngineKind::Ic3 {
                    assert!(frames <= 3, "{} sat3 frames {frames}", e.name());
                }
            }
            v => panic!("{} sat3: {v:?}", e.name()),
        }
        let ts = TransitionSystem::encode(&cnt4(), "cnt4");
        match e.run(&ts, &opts()).verdict {
            Verdict::Unsafe { trace } => {
                assert_eq!(trace.steps(), 3, "{}", e.name());
                assert_eq!(trace.last(), &state_of(&[1, 1]));
                validate_counterexample(&ts, &trace).unwrap();
            }
            v => panic!("{} cnt4: {v:?}", e.name()),
        }
    }
}

#[test]
fn random_models_agree_with_oracle() {
    let f = bundled_factory();
    let p = GenParams::default();
    for seed in 0..150 {
        let c = random_circuit(seed, &p);
        let ts = TransitionSystem::encode(&c, format!("r{seed}"));
        let rm = bfs(&ts, DEFAULT_MAX_STATES).unwrap();
        let expect = oracle_verdict(&ts, &rm);
        for e in engines() {
            let r = e.run(&ts, &opts());
            match (&r.verdict, &expect) {
                (Verdict::Safe { invariant, frames }, OracleVerdict::Safe) => {
                    check_invariant(&ts, invariant, &rm, &f).unwrap();
                    if e != EngineKind::Ic3 {
                        assert!(*frames <= rm.diameter + 1, "seed {seed} {} frames {frames} diameter {}", e.name(), rm.diameter);
                    }
                }
                (Verdict::Unsafe { trace }, OracleVerdict::Unsafe { .. }) => {
                    validate_counterexample(&ts, trace).unwrap();
                }
                (v, o) => panic!("seed {seed} {}: engine {v:?}, oracle {o:?}", e.name()),
            }
        }
    }
}

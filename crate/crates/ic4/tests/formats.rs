use std::path::PathBuf;

use ic4::aiger::{parse_aag, write_aag};
use ic4::dimacs::{read_invariant, write_invariant};
use ic4::witness::{parse_witness, replay, write_witness};
use ic4_core::aig::AigCircuit;
use ic4_core::fixtures::{cnt4, sat3, stuck};
use ic4_core::logic::State;
use ic4_core::oracle::{bfs, check_invariant, DEFAULT_MAX_STATES};
use ic4_core::random::{random_circuit, GenParams};
use ic4_core::sat::bundled_factory;
use ic4_core::ts::TransitionSystem;
use ic4_core::{prove_ic4, EffortMode, Options, Verdict};
use proptest::prelude::*;

fn load(name: &str) -> AigCircuit {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    parse_aag(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Same reset state, next-state function and bad output on every state.
fn same_behaviour(a: &AigCircuit, b: &AigCircuit) {
    assert_eq!(a.num_latches(), b.num_latches());
    assert_eq!(a.num_inputs(), b.num_inputs());
    let resets = |c: &AigCircuit| c.latches.iter().map(|l| l.reset).collect::<Vec<_>>();
    assert_eq!(resets(a), resets(b));
    let n = a.num_latches();
    for bits in 0..1u64 << n {
        let s = State::from_bits(bits, n);
        for x in 0..1u64 << a.num_inputs() {
            let x: Vec<bool> = (0..a.num_inputs()).map(|i| x >> i & 1 == 1).collect();
            assert_eq!(a.step(&s, &x), b.step(&s, &x), "state {s}");
            assert_eq!(a.is_bad(&s, &x), b.is_bad(&s, &x), "state {s}");
        }
    }
}

#[test]
fn fixture_files_match_builtin_circuits() {
    same_behaviour(&load("ts_stuck.aag"), &stuck());
    same_behaviour(&load("ts_sat3.aag"), &sat3());
    same_behaviour(&load("ts_cnt4.aag"), &cnt4());
    assert_eq!(load("ts_sat3.aag").ands.len(), 2);
}

fn small() -> GenParams {
    GenParams { max_latches: 5, max_ands: 16, max_inputs: 2 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aag_round_trip(seed in any::<u64>()) {
        let c = random_circuit(seed, &small());
        let back = parse_aag(&write_aag(&c)).unwrap();
        prop_assert_eq!(&back.latches, &c.latches);
        prop_assert_eq!(&back.ands, &c.ands);
        prop_assert_eq!(back.bad, c.bad);
        prop_assert_eq!(&back.inputs, &c.inputs);
    }

    #[test]
    fn certificates_and_witnesses_survive_files(seed in any::<u64>()) {
        let ts = TransitionSystem::encode(&random_circuit(seed, &small()), "rnd");
        let rm = bfs(&ts, DEFAULT_MAX_STATES).unwrap();
        match prove_ic4(&ts, EffortMode::Minimal, &Options::default()).verdict {
            Verdict::Safe { invariant, .. } => {
                let back = read_invariant(&write_invariant(&ts, &invariant, "ic4-min")).unwrap();
                // the property becomes an explicit clause when it is one
                if !back.includes_property {
                    prop_assert!(invariant.clauses.iter().all(|c| back.clauses.contains(c)));
                }
                prop_assert!(check_invariant(&ts, &back, &rm, &bundled_factory()).is_ok());
            }
            Verdict::Unsafe { trace } => {
                let text = write_witness(&ts, &trace);
                let w = parse_witness(&text, ts.num_latches(), ts.num_inputs()).unwrap();
                let t = replay(&ts, &w).unwrap();
                prop_assert_eq!(t.states, trace.states);
            }
            Verdict::Unknown { reason } => prop_assert!(false, "unknown: {}", reason),
        }
    }
}

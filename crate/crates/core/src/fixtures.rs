//! Small named circuits with known reachability, used by tests and
//! shipped as AIGER files by the command-line crate.

use alloc::vec;

use crate::aig::{AigCircuit, AigLit, AndGate, Latch};
use crate::logic::State;

/// One latch that keeps its initial 0; bad when it is 1.
pub fn stuck() -> AigCircuit {
    AigCircuit {
        max_var: 1,
        inputs: vec![],
        latches: vec![Latch { lit: AigLit(2), next: AigLit(2), reset: false }],
        ands: vec![],
        bad: AigLit(2),
        symbols: vec![],
        comments: vec![],
    }
}

/// next l0 = l0 ∨ ¬l1, next l1 = l1 ∨ l0, bad = l1 ∧ ¬l0.
pub fn sat3() -> AigCircuit {
    AigCircuit {
        max_var: 5,
        inputs: vec![],
        latches: vec![
            Latch { lit: AigLit(2), next: AigLit(7), reset: false },
            Latch { lit: AigLit(4), next: AigLit(9), reset: false },
        ],
        ands: vec![
            // 6 = ¬l0 ∧ l1, so ¬6 = l0 ∨ ¬l1; also the bad signal
            AndGate { lhs: AigLit(6), rhs0: AigLit(3), rhs1: AigLit(4) },
            // 8 = ¬l1 ∧ ¬l0, so ¬8 = l1 ∨ l0
            AndGate { lhs: AigLit(8), rhs0: AigLit(5), rhs1: AigLit(3) },
        ],
        bad: AigLit(6),
        symbols: vec![],
        comments: vec![],
    }
}

/// Mod-4 counter: next l0 = ¬l0, next l1 = l0 ⊕ l1, bad = l0 ∧ l1.
pub fn cnt4() -> AigCircuit {
    AigCircuit {
        max_var: 5,
        inputs: vec![],
        latches: vec![
            Latch { lit: AigLit(2), next: AigLit(3), reset: false },
            Latch { lit: AigLit(4), next: AigLit(10), reset: false },
        ],
        ands: vec![
            AndGate { lhs: AigLit(6), rhs0: AigLit(2), rhs1: AigLit(4) },
            AndGate { lhs: AigLit(8), rhs0: AigLit(3), rhs1: AigLit(5) },
            // 10 = ¬(l0∧l1) ∧ ¬(¬l0∧¬l1) = l0 ⊕ l1
            AndGate { lhs: AigLit(10), rhs0: AigLit(7), rhs1: AigLit(9) },
        ],
        bad: AigLit(6),
        symbols: vec![],
        comments: vec![],
    }
}

/// State from bits in latch order.
pub fn state_of(bits: &[u8]) -> State {
    State::new(bits.iter().map(|&b| b == 1).collect())
}

//! Seeded random circuits for differential testing.

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aig::{AigCircuit, AigLit, AndGate, Latch};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub max_latches: usize,
    pub max_ands: usize,
    pub max_inputs: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { max_latches: 8, max_ands: 32, max_inputs: 2 }
    }
}

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// A valid circuit with `1..=max_latches` latches, `0..=max_inputs` inputs
/// and `0..=max_ands` gates, fully determined by the seed.
pub fn random_circuit(seed: u64, p: &GenParams) -> AigCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nl = 1 + below(&mut rng, p.max_latches.max(1));
    let ni = below(&mut rng, p.max_inputs + 1);
    let na = below(&mut rng, p.max_ands + 1);
    let mut signals: Vec<AigLit> = Vec::new();
    let inputs: Vec<AigLit> = (0..ni).map(|i| AigLit(2 * (i as u32 + 1))).collect();
    let latch_lits: Vec<AigLit> = (0..nl).map(|i| AigLit(2 * ((ni + i) as u32 + 1))).collect();
    signals.extend(&inputs);
    signals.extend(&latch_lits);
    let pick = |rng: &mut ChaCha8Rng, signals: &[AigLit]| {
        let l = signals[below(rng, signals.len())];
        if rng.next_u32() & 1 == 1 {
            l.negate()
        } else {
            l
        }
    };
    let mut ands = Vec::new();
    for g in 0..na {
        let lhs = AigLit(2 * ((ni + nl + g) as u32 + 1));
        let a = pick(&mut rng, &signals);
        let b = pick(&mut rng, &signals);
        ands.push(AndGate { lhs, rhs0: a, rhs1: b });
        signals.push(lhs);
    }
    let latches = latch_lits
        .iter()
        .map(|&lit| Latch { lit, next: pick(&mut rng, &signals), reset: rng.next_u32() % 4 == 0 })
        .collect();
    // bias the bad output toward deep gates so it depends on many latches
    let deep = &signals[signals.len().saturating_sub(4).max(ni)..];
    let bad = pick(&mut rng, deep);
    AigCircuit {
        max_var: (ni + nl + na) as u32,
        inputs,
        latches,
        ands,
        bad,
        symbols: Vec::new(),
        comments: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_circuits_validate() {
        for seed in 0..300 {
            let c = random_circuit(seed, &GenParams::default());
            assert_eq!(c.validate(), Ok(()), "seed {seed}");
            assert!(c.num_latches() >= 1 && c.num_latches() <= 8);
            assert!(c.num_inputs() <= 2 && c.ands.len() <= 32);
        }
    }

    #[test]
    fn seed_determines_circuit() {
        let p = GenParams::default();
        assert_eq!(random_circuit(9, &p), random_circuit(9, &p));
    }
}

//! Delta-encoded frame sequence.
//!
//! A lemma stored at level `j` belongs to every `F_i` with `1 <= i <= j`;
//! `F_0` is the initial-state formula alone. `Clauses(F_{i+1}) ⊆
//! Clauses(F_i)` therefore holds by construction.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::logic::{Clause, Cube};

#[derive(Clone, Debug)]
pub struct FrameSeq {
    init: Vec<Clause>,
    delta: Vec<BTreeSet<Clause>>,
}

impl FrameSeq {
    pub fn new(init: Vec<Clause>) -> FrameSeq {
        FrameSeq { init, delta: alloc::vec![BTreeSet::new()] }
    }

    /// Index of the highest open frame.
    pub fn top(&self) -> usize {
        self.delta.len() - 1
    }

    pub fn open(&mut self) -> usize {
        self.delta.push(BTreeSet::new());
        self.top()
    }

    pub fn init(&self) -> &[Clause] {
        &self.init
    }

    /// Lemmas stored exactly at `level`, in canonical order.
    pub fn delta(&self, level: usize) -> impl Iterator<Item = &Clause> {
        self.delta[level].iter()
    }

    pub fn delta_len(&self, level: usize) -> usize {
        self.delta[level].len()
    }

    pub fn delta_contains(&self, level: usize, c: &Clause) -> bool {
        self.delta.get(level).is_some_and(|d| d.contains(c))
    }

    /// Lemmas of `F_i` for `i >= 1` (the property clauses are implicit).
    pub fn lemmas(&self, i: usize) -> Vec<Clause> {
        debug_assert!(i >= 1);
        self.delta[i.max(1)..].iter().flatten().cloned().collect()
    }

    /// Explicit clause set of `F_i`: `I` for `i = 0`, else the lemmas.
    pub fn frame(&self, i: usize) -> Vec<Clause> {
        if i == 0 {
            self.init.clone()
        } else {
            self.lemmas(i)
        }
    }

    /// Whether some lemma of `F_level` already excludes every state of the
    /// cube.
    pub fn blocks(&self, cube: &Cube, level: usize) -> bool {
        let neg = cube.negate();
        self.delta[level.max(1)..]
            .iter()
            .flatten()
            .any(|c| c.subsumes(&neg))
    }

    /// Inserts a lemma at `level`, dropping lemmas at levels `<= level` that
    /// it subsumes. Returns false when a lemma at `>= level` already
    /// subsumes it.
    pub fn add(&mut self, clause: Clause, level: usize) -> bool {
        assert!(level >= 1 && level <= self.top());
        if self.delta[level..].iter().flatten().any(|c| c.subsumes(&clause)) {
            return false;
        }
        for d in &mut self.delta[1..=level] {
            d.retain(|c| !clause.subsumes(c));
        }
        self.delta[level].insert(clause);
        true
    }

    /// Moves a lemma from `level` to `level + 1`.
    pub fn push_up(&mut self, level: usize, clause: &Clause) {
        if self.delta[level].remove(clause) {
            let c = clause.clone();
            if !self.delta[level + 1..].iter().flatten().any(|d| d.subsumes(&c)) {
                self.delta[level + 1].retain(|d| !c.subsumes(d));
                self.delta[level + 1].insert(c);
            }
        }
    }

    /// First level `1 <= i < top` with `F_i = F_{i+1}`.
    pub fn fixed_point(&self, upto: usize) -> Option<usize> {
        (1..=upto.min(self.top().saturating_sub(1))).find(|&i| self.delta[i].is_empty())
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.delta.iter().map(BTreeSet::len).collect();
        v[0] = self.init.len();
        v
    }
}

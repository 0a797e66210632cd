//! Pushing that fixes broken pushing conditions or proves clauses
//! unpushable with concrete reachable traces.

use alloc::vec::Vec;

use crate::engine::{BlockOutcome, Engine, ProofObligation, Pushing, Root, UnpushProof};
use crate::logic::{Clause, State};
use crate::verdict::{EffortMode, Stop, Trace, UnknownReason};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fixed {
    Pushed,
    /// The clause left the level through subsumption.
    Gone,
    Unpushable,
}

impl Engine<'_> {
    /// Pushes the lemmas of `F_k` into the open `F_{k+1}`, fixing broken
    /// pushing conditions as `mode` allows. Returns a level whose delta is
    /// empty, if any.
    pub fn new_push(&mut self, k: usize, mode: EffortMode) -> Result<Option<usize>, UnknownReason> {
        self.new_push_inner(k, mode).map_err(Into::into)
    }

    pub(crate) fn new_push_inner(&mut self, k: usize, mode: EffortMode) -> Result<Option<usize>, Stop> {
        assert!(self.frames.top() == k + 1, "F_{{k+1}} must be open");
        self.k = k;
        let mut proofs_here = 0;
        let mut plain = false;
        loop {
            let mut added = false;
            let lemmas: Vec<Clause> = self.frames.delta(k).cloned().collect();
            for c in lemmas {
                if !self.frames.delta_contains(k, &c) || self.unpushable.contains(&(k, c.clone())) {
                    continue;
                }
                if plain {
                    if self.check_pushing(&c, k)? == Pushing::Holds {
                        self.push_clause(k, &c);
                    }
                    continue;
                }
                self.attempt_budget = match mode {
                    EffortMode::Heuristic(b) => Some(b.conflicts.get()),
                    _ => None,
                };
                let r = self.fix_clause(&c, k, &mut added);
                self.attempt_budget = None;
                match r {
                    Ok(Fixed::Unpushable) => {
                        proofs_here += 1;
                        plain = match mode {
                            EffortMode::Minimal => true,
                            EffortMode::Maximal => false,
                            EffortMode::Heuristic(b) => proofs_here >= b.unpush_per_frame.get(),
                        };
                    }
                    Ok(_) => {}
                    // out of budget: leave the clause where it is
                    Err(Stop::Budget) => {}
                    Err(e) => return Err(e),
                }
            }
            if !added {
                break;
            }
        }
        if self.opts.self_check && !self.local {
            self.check_store_sound();
        }
        if self.frames.delta_len(k) == 0 {
            return Ok(Some(k));
        }
        Ok(self.frames.fixed_point(k))
    }

    /// Every stored state of depth `d` satisfies `F_d`. Local runs are
    /// exempt: their frames only cover constrained paths.
    fn check_store_sound(&self) {
        for e in self.reach.entries() {
            if e.depth > self.frames.top() {
                continue;
            }
            for c in self.frames.lemmas(e.depth.max(1)) {
                assert_eq!(
                    e.state.satisfies(&c),
                    Ok(true),
                    "stored state {} of depth {} violates lemma {c}",
                    e.state,
                    e.depth
                );
            }
        }
    }

    /// Retries the pushing condition of `c` at `level` until it holds or a
    /// trace proves it unpushable.
    fn fix_clause(&mut self, c: &Clause, level: usize, added: &mut bool) -> Result<Fixed, Stop> {
        loop {
            if !self.frames.delta_contains(level, c) {
                return Ok(Fixed::Gone);
            }
            let s = match self.check_pushing(c, level)? {
                Pushing::Holds => {
                    self.push_clause(level, c);
                    return Ok(Fixed::Pushed);
                }
                Pushing::Fails(s) => s,
            };
            if let Some(t) = self.reusable(c, level, &s) {
                self.mark_unpushable(level, c, t, true);
                return Ok(Fixed::Unpushable);
            }
            let root = ProofObligation {
                cube: s.to_cube(),
                level: level + 1,
                depth: 0,
                successor: None,
                input: Vec::new(),
            };
            match self.block_root(root, Root::Target)? {
                BlockOutcome::Reached(t) => {
                    if let Err(e) = self.reach.record(self.ts, &t) {
                        panic!("unpushability trace fails replay: {e}");
                    }
                    self.mark_unpushable(level, c, t, false);
                    return Ok(Fixed::Unpushable);
                }
                BlockOutcome::Blocked => {
                    *added = true;
                    self.fix_pending()?;
                }
            }
        }
    }

    /// A stored trace of at most `level + 1` steps to `s` or to another
    /// state falsifying `c`.
    fn reusable(&mut self, c: &Clause, level: usize, s: &State) -> Option<Trace> {
        if !self.opts.reuse {
            return None;
        }
        let hit = self
            .reach
            .covers(s)
            .filter(|&i| self.reach.get(i).depth <= level + 1)
            .or_else(|| self.reach.falsifying(c, level + 1))?;
        Some(self.reach.trace_to(hit))
    }

    fn mark_unpushable(&mut self, level: usize, c: &Clause, trace: Trace, reused: bool) {
        if self.opts.self_check {
            assert!(trace.steps() <= level + 1, "unpushability trace longer than {} steps", level + 1);
            assert_eq!(trace.last().satisfies(c), Ok(false), "trace end satisfies the clause");
        }
        self.unpushable.insert((level, c.clone()));
        self.stats.unpushable += 1;
        if reused {
            self.stats.reuse_hits += 1;
        }
        self.proofs.push(UnpushProof { level, clause: c.clone(), trace, reused });
    }

    /// Maximal mode: fixes the pushing condition of lemmas inserted below
    /// the current level. Not re-entered while already fixing.
    pub(crate) fn fix_pending(&mut self) -> Result<(), Stop> {
        if self.fixing || self.mode != Some(EffortMode::Maximal) {
            return Ok(());
        }
        self.fixing = true;
        let r = self.drain_pending();
        self.fixing = false;
        r
    }

    fn drain_pending(&mut self) -> Result<(), Stop> {
        while let Some((level, c)) = self.pending.pop() {
            if level >= self.k || self.unpushable.contains(&(level, c.clone())) {
                continue;
            }
            let mut added = false;
            self.fix_clause(&c, level, &mut added)?;
            // lemmas inserted by the fix land back in `pending`
        }
        Ok(())
    }
}

//! Records every clause handed to the solvers of a run, for debugging dumps.

use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use ic4_core::logic::Lit;
use ic4_core::sat::{IncrementalSolver, SolveStatus, SolverFactory};

#[derive(Clone, Default)]
pub struct ClauseLog {
    instances: Arc<Mutex<Vec<Vec<Vec<Lit>>>>>,
}

struct Recording {
    inner: Box<dyn IncrementalSolver + Send>,
    log: ClauseLog,
    id: usize,
}

impl IncrementalSolver for Recording {
    fn reserve_vars(&mut self, n: usize) {
        self.inner.reserve_vars(n)
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        self.log.instances.lock().expect("log poisoned")[self.id].push(lits.to_vec());
        self.inner.add_clause(lits)
    }

    fn assume(&mut self, lit: Lit) {
        self.inner.assume(lit)
    }

    fn solve(&mut self) -> SolveStatus {
        self.inner.solve()
    }

    fn value(&self, lit: Lit) -> Option<bool> {
        self.inner.value(lit)
    }

    fn failed(&self, lit: Lit) -> bool {
        self.inner.failed(lit)
    }

    fn set_conflict_limit(&mut self, limit: Option<u64>) {
        self.inner.set_conflict_limit(limit)
    }

    fn conflicts(&self) -> u64 {
        self.inner.conflicts()
    }
}

impl ClauseLog {
    /// Wraps `inner` so every instance it builds logs into `self`.
    pub fn wrap(&self, inner: SolverFactory) -> SolverFactory {
        let log = self.clone();
        Arc::new(move |seed| {
            let id = {
                let mut v = log.instances.lock().expect("log poisoned");
                v.push(Vec::new());
                v.len() - 1
            };
            Box::new(Recording { inner: inner(seed), log: log.clone(), id })
        })
    }

    /// One DIMACS section per solver instance, in creation order. Sections
    /// after the first are separated by `c solver N` comments only, so each
    /// instance is extracted by splitting on those lines.
    pub fn to_dimacs(&self) -> String {
        let v = self.instances.lock().expect("log poisoned");
        let mut s = String::new();
        for (i, clauses) in v.iter().enumerate() {
            let nv = clauses.iter().flatten().map(|l| l.var().index() + 1).max().unwrap_or(0);
            let _ = writeln!(s, "c solver {i}");
            let _ = writeln!(s, "p cnf {nv} {}", clauses.len());
            for c in clauses {
                for l in c {
                    let _ = write!(s, "{} ", l.to_dimacs());
                }
                s.push_str("0\n");
            }
        }
        s
    }
}

//! Incremental SAT service.
//!
//! [`IncrementalSolver`] is the add/assume/solve/value/failed operation set
//! any backend must provide; [`Cdcl`] is the bundled implementation.
//! [`SolverHandle`] layers frame-tagged clauses (via activation literals),
//! temporary clauses and conflict budgets on top.

mod cdcl;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

pub use cdcl::Cdcl;

use crate::logic::{Clause, Lit, State, Var};
use crate::ts::TransitionSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
    /// The conflict limit was reached first.
    Unknown,
}

/// The incremental interface every backend implements. Variables are created
/// implicitly by use; assumptions are cleared by every `solve` call.
pub trait IncrementalSolver {
    fn reserve_vars(&mut self, n: usize);
    fn add_clause(&mut self, lits: &[Lit]);
    fn assume(&mut self, lit: Lit);
    fn solve(&mut self) -> SolveStatus;
    /// Model value after `Sat`.
    fn value(&self, lit: Lit) -> Option<bool>;
    /// Whether the assumption `lit` took part in the last `Unsat` answer.
    fn failed(&self, lit: Lit) -> bool;
    /// Conflicts allowed per `solve` call from now on; `None` is unlimited.
    fn set_conflict_limit(&mut self, limit: Option<u64>);
    fn conflicts(&self) -> u64;
}

/// Builds a solver from a seed.
pub type SolverFactory = Arc<dyn Fn(u64) -> Box<dyn IncrementalSolver + Send> + Send + Sync>;

pub fn bundled_factory() -> SolverFactory {
    Arc::new(|seed| Box::new(Cdcl::new(seed)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    /// Total model indexed by variable.
    Sat(Vec<bool>),
    /// Subset of the assumptions that is already unsatisfiable.
    Unsat(Vec<Lit>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetExceeded;

/// A solver plus activation literals for frame-tagged clauses.
pub struct SolverHandle {
    solver: Box<dyn IncrementalSolver + Send>,
    num_vars: usize,
    activation: BTreeMap<usize, Lit>,
    budget: Option<u64>,
    calls: u64,
}

impl SolverHandle {
    pub fn new(factory: &SolverFactory, seed: u64, base_vars: usize) -> SolverHandle {
        let mut solver = factory(seed);
        solver.reserve_vars(base_vars);
        SolverHandle {
            solver,
            num_vars: base_vars,
            activation: BTreeMap::new(),
            budget: None,
            calls: 0,
        }
    }

    pub fn bundled(seed: u64, base_vars: usize) -> SolverHandle {
        SolverHandle::new(&bundled_factory(), seed, base_vars)
    }

    fn fresh_lit(&mut self) -> Lit {
        let v = Var(self.num_vars as u32);
        self.num_vars += 1;
        self.solver.reserve_vars(self.num_vars);
        v.lit(true)
    }

    /// Activation literal of frame `frame`; created on first use.
    pub fn activation(&mut self, frame: usize) -> Lit {
        if let Some(&a) = self.activation.get(&frame) {
            return a;
        }
        let a = self.fresh_lit();
        self.activation.insert(frame, a);
        a
    }

    /// Adds a clause, active always (`tag = None`) or only while the
    /// frame's activation literal is assumed.
    pub fn add_clause(&mut self, cl: &Clause, tag: Option<usize>) {
        self.add_lits(cl.lits(), tag);
    }

    pub fn add_lits(&mut self, lits: &[Lit], tag: Option<usize>) {
        match tag {
            None => self.solver.add_clause(lits),
            Some(f) => {
                let a = self.activation(f);
                let mut ls = lits.to_vec();
                ls.push(!a);
                self.solver.add_clause(&ls);
            }
        }
    }

    /// Adds `lits` guarded by a fresh literal; the clause is active while
    /// the returned literal is assumed, until [`SolverHandle::release`].
    pub fn add_temporary(&mut self, lits: &[Lit]) -> Lit {
        let a = self.fresh_lit();
        let mut ls = lits.to_vec();
        ls.push(!a);
        self.solver.add_clause(&ls);
        a
    }

    pub fn release(&mut self, guard: Lit) {
        self.solver.add_clause(&[!guard]);
    }

    /// Conflicts allowed per query; `None` for unlimited.
    pub fn set_budget(&mut self, budget: Option<u64>) {
        self.budget = budget;
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn conflicts(&self) -> u64 {
        self.solver.conflicts()
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SatResult, BudgetExceeded> {
        self.calls += 1;
        self.solver.set_conflict_limit(self.budget);
        for &a in assumptions {
            self.solver.assume(a);
        }
        match self.solver.solve() {
            SolveStatus::Sat => {
                let model = (0..self.num_vars)
                    .map(|v| self.solver.value(Var(v as u32).lit(true)).unwrap_or(false))
                    .collect();
                Ok(SatResult::Sat(model))
            }
            SolveStatus::Unsat => {
                let mut core: Vec<Lit> = assumptions
                    .iter()
                    .copied()
                    .filter(|&a| self.solver.failed(a))
                    .collect();
                core.dedup();
                Ok(SatResult::Unsat(core))
            }
            SolveStatus::Unknown => Err(BudgetExceeded),
        }
    }
}

/// Which state-variable copy of a model to read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateCopy {
    Current,
    Next,
}

/// Projects a model onto the chosen state copy, renamed to current-state
/// variables.
pub fn extract_state(ts: &TransitionSystem, model: &[bool], copy: StateCopy) -> State {
    match copy {
        StateCopy::Current => ts.current_state(model),
        StateCopy::Next => ts.next_state(model),
    }
}

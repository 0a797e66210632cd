//! Frame-based reachability engine shared by all proof modes.
//!
//! Queries go to one incremental frame solver holding `T`, the property
//! definitions and every lemma tagged by its level. A second solver holding
//! only `T` shrinks predecessor states by unsat cores.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::certify::{certify, Assumed, Target};
use crate::frames::FrameSeq;
use crate::logic::{Clause, Cube, InputVec, Lit, State};
use crate::oracle::validate_counterexample;
use crate::reach::ReachStore;
use crate::sat::{SatResult, SolverHandle};
use crate::stats::Stats;
use crate::ts::{BadSignal, TransitionSystem};
use crate::verdict::{EffortMode, Invariant, Options, Stop, Trace, UnknownReason, Verdict};

/// What the run must show unreachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Goal {
    Property,
    Avoid(State),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Cat {
    Bad,
    Consecution,
    Generalize,
    Pushing,
}

/// A set of states to be shown unreachable within `level` steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofObligation {
    pub cube: Cube,
    pub level: usize,
    /// Distance from the root obligation.
    pub depth: usize,
    /// Obligation whose cube every state of this one reaches under `input`.
    pub successor: Option<usize>,
    pub input: InputVec,
}

/// How the root obligation relates to the target.
#[derive(Clone, Debug)]
pub(crate) enum Root {
    /// The root cube itself is the target.
    Target,
    /// Every root state reaches the target under the root input; for the
    /// property goal the target is bad under `bad_inputs`.
    Pred { bad_inputs: Option<InputVec> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockOutcome {
    Blocked,
    Reached(Trace),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pushing {
    Holds,
    /// A successor of `F_k` falsifying the clause.
    Fails(State),
}

pub(crate) enum Ind {
    /// Relative induction holds; the cube shrunk by the unsat core.
    Holds(Cube),
    Fails { pred: State, input: InputVec },
}

/// A clause shown unpushable from `level` by a trace to a state it
/// excludes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnpushProof {
    pub level: usize,
    pub clause: Clause,
    pub trace: Trace,
    pub reused: bool,
}

pub struct Engine<'a> {
    pub(crate) ts: &'a TransitionSystem,
    pub(crate) opts: Options,
    pub(crate) goal: Goal,
    /// Permanent current-state constraints of a local run.
    pub(crate) constraint: Vec<Clause>,
    pub(crate) local: bool,
    pub(crate) frames: FrameSeq,
    pub(crate) solver: SolverHandle,
    lift: SolverHandle,
    pub(crate) reach: &'a mut ReachStore,
    pub(crate) stats: Stats,
    pub(crate) mode: Option<EffortMode>,
    pub(crate) unpushable: BTreeSet<(usize, Clause)>,
    pub(crate) proofs: Vec<UnpushProof>,
    pub(crate) pending: Vec<(usize, Clause)>,
    pub(crate) fixing: bool,
    /// Level currently being blocked or pushed.
    pub(crate) k: usize,
    pub(crate) attempt_budget: Option<u64>,
    reach_at_start: usize,
}

impl<'a> Engine<'a> {
    /// Engine for the property of `ts`; `mode = None` runs plain pushing.
    pub fn new(
        ts: &'a TransitionSystem,
        opts: &Options,
        mode: Option<EffortMode>,
        reach: &'a mut ReachStore,
    ) -> Engine<'a> {
        Engine::build(ts, opts, mode, Goal::Property, Vec::new(), reach)
    }

    pub(crate) fn build(
        ts: &'a TransitionSystem,
        opts: &Options,
        mode: Option<EffortMode>,
        goal: Goal,
        constraint: Vec<Clause>,
        reach: &'a mut ReachStore,
    ) -> Engine<'a> {
        let local = matches!(goal, Goal::Avoid(_));
        let engine = match (mode, local) {
            (None, false) => "ic3",
            (None, true) => "ic3-local",
            (Some(_), false) => "ic4",
            (Some(_), true) => "ic4-local",
        };
        let mut solver = SolverHandle::new(&opts.solver, opts.seed, ts.num_vars());
        let mut lift = SolverHandle::new(&opts.solver, opts.seed ^ 0x9e37_79b9, ts.num_vars());
        for c in ts.trans().iter().chain(ts.prop_defs()) {
            solver.add_clause(c, None);
            lift.add_clause(c, None);
        }
        for c in ts.init() {
            solver.add_clause(c, Some(0));
        }
        if let BadSignal::Lit(b) = ts.bad() {
            solver.add_lits(&[!b], None);
        }
        if let Goal::Avoid(s) = &goal {
            solver.add_clause(&s.to_cube().negate(), None);
        }
        for c in &constraint {
            solver.add_clause(c, None);
        }
        let reach_at_start = reach.generated();
        Engine {
            ts,
            opts: opts.clone(),
            goal,
            constraint,
            local,
            frames: FrameSeq::new(ts.init().to_vec()),
            solver,
            lift,
            reach,
            stats: Stats::new(engine, mode.as_ref().map(EffortMode::name)),
            mode,
            unpushable: BTreeSet::new(),
            proofs: Vec::new(),
            pending: Vec::new(),
            fixing: false,
            k: 0,
            attempt_budget: None,
            reach_at_start,
        }
    }

    pub fn frames(&self) -> &FrameSeq {
        &self.frames
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn proofs(&self) -> &[UnpushProof] {
        &self.proofs
    }

    pub fn reach(&self) -> &ReachStore {
        self.reach
    }

    /// Opens the next frame.
    pub fn open_frame(&mut self) -> usize {
        self.frames.open()
    }

    /// Inserts a lemma without deriving it. The caller vouches for
    /// soundness.
    pub fn insert_lemma(&mut self, clause: Clause, level: usize) {
        self.add_lemma(clause, level);
    }

    fn interrupted(&self) -> bool {
        self.opts.interrupt.as_ref().is_some_and(|f| f())
    }

    pub(crate) fn query(&mut self, cat: Cat, assumptions: &[Lit]) -> Result<SatResult, Stop> {
        if self.interrupted() {
            return Err(Stop::Interrupted);
        }
        let calls = &mut self.stats.sat_calls;
        match cat {
            Cat::Bad => calls.bad += 1,
            Cat::Consecution => calls.consecution += 1,
            Cat::Generalize => calls.generalize += 1,
            Cat::Pushing => calls.pushing += 1,
        }
        self.solver.set_budget(self.attempt_budget);
        let before = self.solver.conflicts();
        let r = self.solver.solve(assumptions);
        if let Some(b) = self.attempt_budget.as_mut() {
            *b = b.saturating_sub(self.solver.conflicts() - before);
        }
        r.map_err(|_| Stop::Budget)
    }

    /// Activation literals selecting `F_i`.
    pub(crate) fn frame_lits(&mut self, i: usize) -> Vec<Lit> {
        if i == 0 {
            return vec![self.solver.activation(0)];
        }
        (i..=self.frames.top()).map(|j| self.solver.activation(j)).collect()
    }

    fn state_lits(s: &State) -> Vec<Lit> {
        s.to_cube().lits().to_vec()
    }

    fn input_lits(vars: &[crate::logic::Var], x: &[bool]) -> Vec<Lit> {
        vars.iter().zip(x).map(|(v, &b)| v.lit(b)).collect()
    }

    /// Bad-target literals on next-state variables; `None` when no state
    /// is bad.
    fn target_next(&self) -> Option<Vec<Lit>> {
        match &self.goal {
            Goal::Property => match self.ts.bad_next() {
                BadSignal::Never => None,
                BadSignal::Always => Some(Vec::new()),
                BadSignal::Lit(b) => Some(vec![b]),
            },
            Goal::Avoid(s) => Some(s.to_cube().lits().iter().map(|&l| self.ts.prime_lit(l)).collect()),
        }
    }

    /// Inputs raising bad at `s`, when the bad cone reads inputs.
    pub(crate) fn bad_inputs_for(&mut self, s: &State) -> Option<InputVec> {
        if self.ts.bad_input_vars().is_empty() {
            return None;
        }
        let BadSignal::Lit(b) = self.ts.bad() else { return None };
        let mut a = Self::state_lits(s);
        a.push(b);
        self.stats.sat_calls.lift += 1;
        match self.lift.solve(&a) {
            Ok(SatResult::Sat(m)) => Some(self.ts.inputs_of(&m, self.ts.bad_input_vars())),
            _ => None,
        }
    }

    fn lifting(&self) -> bool {
        self.opts.lifting && !self.local
    }

    /// Shrinks `p` to the states that also reach a bad state under `x`
    /// (current) and `xb` (next-state bad inputs).
    fn lift_bad(&mut self, p: &State, x: &[bool], xb: &[bool]) -> Cube {
        let full = p.to_cube();
        let (true, BadSignal::Lit(b)) = (self.lifting(), self.ts.bad_next()) else { return full };
        let mut a = vec![!b];
        a.extend(Self::input_lits(self.ts.input_vars(), x));
        a.extend(Self::input_lits(self.ts.bad_next_input_vars(), xb));
        a.extend(full.lits());
        self.stats.sat_calls.lift += 1;
        match self.lift.solve(&a) {
            Ok(SatResult::Unsat(core)) => full.retain(|l| core.contains(&l)),
            _ => {
                debug_assert!(false, "lifting query must be unsatisfiable");
                full
            }
        }
    }

    /// Shrinks `p` to states that enter `c` under input `x`.
    fn lift_to(&mut self, p: &State, x: &[bool], c: &Cube) -> Cube {
        let full = p.to_cube();
        if !self.lifting() {
            return full;
        }
        let neg: Vec<Lit> = c.lits().iter().map(|&l| !self.ts.prime_lit(l)).collect();
        let g = self.lift.add_temporary(&neg);
        let mut a = vec![g];
        a.extend(Self::input_lits(self.ts.input_vars(), x));
        a.extend(full.lits());
        self.stats.sat_calls.lift += 1;
        let r = self.lift.solve(&a);
        self.lift.release(g);
        match r {
            Ok(SatResult::Unsat(core)) => full.retain(|l| core.contains(&l)),
            _ => {
                debug_assert!(false, "lifting query must be unsatisfiable");
                full
            }
        }
    }

    /// `F_{level-1} ∧ ¬c ∧ T ∧ c′`.
    pub(crate) fn relative_induction(&mut self, c: &Cube, level: usize, cat: Cat) -> Result<Ind, Stop> {
        debug_assert!(level >= 1);
        let neg: Vec<Lit> = c.lits().iter().map(|&l| !l).collect();
        let g = self.solver.add_temporary(&neg);
        let mut a = self.frame_lits(level - 1);
        a.push(g);
        a.extend(c.lits().iter().map(|&l| self.ts.prime_lit(l)));
        let r = self.query(cat, &a);
        self.solver.release(g);
        match r? {
            SatResult::Unsat(core) => {
                let kept = c.retain(|l| core.contains(&self.ts.prime_lit(l)));
                Ok(Ind::Holds(self.repair_init(kept, c)))
            }
            SatResult::Sat(m) => Ok(Ind::Fails {
                pred: self.ts.current_state(&m),
                input: self.ts.inputs_of(&m, self.ts.input_vars()),
            }),
        }
    }

    /// Adds back a literal of `orig` false at the initial state if `kept`
    /// lost them all.
    fn repair_init(&self, kept: Cube, orig: &Cube) -> Cube {
        if !self.ts.cube_meets_init(&kept) {
            return kept;
        }
        let init = self.ts.init_state();
        let l = orig
            .lits()
            .iter()
            .copied()
            .find(|l| init.get(l.var().index()) != Some(l.is_positive()))
            .expect("cube excludes the initial state");
        Cube::new(kept.lits().iter().copied().chain([l])).expect("consistent cube")
    }

    /// Whether a stored state of depth at most `level` lies in the cube.
    fn reach_hit(&self, c: &Cube, level: usize) -> bool {
        self.reach.entries().iter().any(|e| e.depth <= level && c.contains_state(&e.state))
    }

    /// Drops literals while the cube stays disjoint from `I`, free of stored
    /// reachable states and inductive relative to `F_{level-1}`.
    pub fn generalize(&mut self, cube: Cube, level: usize) -> Result<Cube, UnknownReason> {
        self.generalize_cube(cube, level).map_err(Into::into)
    }

    pub(crate) fn generalize_cube(&mut self, cube: Cube, level: usize) -> Result<Cube, Stop> {
        let order = cube.lits().to_vec();
        let mut cur = cube;
        for l in order {
            if cur.len() <= 1 {
                break;
            }
            let Some(pos) = cur.lits().iter().position(|&x| x == l) else { continue };
            let cand = cur.without(pos);
            if self.ts.cube_meets_init(&cand) || self.reach_hit(&cand, level) {
                continue;
            }
            if let Ind::Holds(core) = self.relative_induction(&cand, level, Cat::Generalize)? {
                cur = if self.reach_hit(&core, level) { cand } else { core };
            }
        }
        Ok(cur)
    }

    /// Highest level `<= top` at which the cube is still inductive.
    fn push_forward(&mut self, c: &Cube, level: usize) -> Result<usize, Stop> {
        let mut j = level;
        while j < self.frames.top() {
            match self.relative_induction(c, j + 1, Cat::Consecution)? {
                Ind::Holds(_) => j += 1,
                Ind::Fails { .. } => break,
            }
        }
        Ok(j)
    }

    pub(crate) fn add_lemma(&mut self, clause: Clause, level: usize) {
        if !self.frames.add(clause.clone(), level) {
            return;
        }
        self.solver.add_clause(&clause, Some(level));
        self.stats.lemmas += 1;
        if self.opts.self_check {
            self.check_lemma(&clause, level);
        }
        if self.mode == Some(EffortMode::Maximal) && level < self.k {
            self.pending.push((level, clause));
        }
    }

    /// `I → C` and `F_{level-1} ∧ T → C′`.
    fn check_lemma(&mut self, clause: &Clause, level: usize) {
        assert_eq!(
            self.ts.init_state().satisfies(clause),
            Ok(true),
            "lemma {clause} excludes the initial state"
        );
        let mut a = self.frame_lits(level - 1);
        a.extend(clause.lits().iter().map(|&l| !self.ts.prime_lit(l)));
        self.solver.set_budget(None);
        let r = self.solver.solve(&a);
        assert!(
            matches!(r, Ok(SatResult::Unsat(_))),
            "lemma {clause} at level {level} is not implied by the previous frame"
        );
    }

    /// Blocks a target cube at `level`; a reached trace ends inside it.
    pub fn block(&mut self, cube: Cube, level: usize) -> Result<BlockOutcome, UnknownReason> {
        let root = ProofObligation { cube, level, depth: 0, successor: None, input: Vec::new() };
        self.block_root(root, Root::Target).map_err(Into::into)
    }

    pub(crate) fn block_root(&mut self, root: ProofObligation, kind: Root) -> Result<BlockOutcome, Stop> {
        let mut obs = vec![root];
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((obs[0].level, 0usize, 0usize)));
        while let Some(Reverse((level, depth, idx))) = heap.pop() {
            self.stats.obligations += 1;
            let cube = obs[idx].cube.clone();
            if level == 0 || self.ts.cube_meets_init(&cube) {
                let t = self.build_trace(&obs, idx, &kind);
                return Ok(BlockOutcome::Reached(t));
            }
            if self.frames.blocks(&cube, level) {
                continue;
            }
            match self.relative_induction(&cube, level, Cat::Consecution)? {
                Ind::Holds(core) => {
                    let core = if self.reach_hit(&core, level) { cube } else { core };
                    let g = self.generalize_cube(core, level)?;
                    let j = self.push_forward(&g, level)?;
                    self.add_lemma(g.negate(), j);
                }
                Ind::Fails { pred, input } => {
                    let pc = self.lift_to(&pred, &input, &cube);
                    obs.push(ProofObligation {
                        cube: pc,
                        level: level - 1,
                        depth: depth + 1,
                        successor: Some(idx),
                        input,
                    });
                    heap.push(Reverse((level - 1, depth + 1, obs.len() - 1)));
                    heap.push(Reverse((level, depth, idx)));
                }
            }
        }
        Ok(BlockOutcome::Blocked)
    }

    /// Replays the obligation chain from the initial state, which lies in
    /// the cube of `leaf`.
    fn build_trace(&mut self, obs: &[ProofObligation], leaf: usize, kind: &Root) -> Trace {
        let mut s = self.ts.init_state().clone();
        let mut t = Trace::single(s.clone());
        let mut cur = leaf;
        loop {
            let ob = &obs[cur];
            debug_assert!(ob.cube.contains_state(&s));
            match (ob.successor, kind) {
                (Some(n), _) => cur = n,
                (None, Root::Pred { .. }) => {}
                (None, Root::Target) => break,
            }
            s = self.ts.step(&s, &ob.input);
            t.inputs.push(ob.input.clone());
            t.states.push(s.clone());
            if ob.successor.is_none() {
                break;
            }
        }
        if let Root::Pred { bad_inputs } = kind {
            t.bad_inputs = match (&self.goal, bad_inputs) {
                (Goal::Property, Some(x)) if !self.ts.bad_input_vars().is_empty() => Some(x.clone()),
                (Goal::Property, _) => None,
                (Goal::Avoid(_), _) => {
                    let last = t.last().clone();
                    self.bad_inputs_for(&last)
                }
            };
        }
        t
    }

    /// `F_k ∧ T → C′`.
    pub fn check_pushing_condition(&mut self, c: &Clause, k: usize) -> Result<Pushing, UnknownReason> {
        self.check_pushing(c, k).map_err(Into::into)
    }

    pub(crate) fn check_pushing(&mut self, c: &Clause, k: usize) -> Result<Pushing, Stop> {
        let mut a = self.frame_lits(k);
        a.extend(c.lits().iter().map(|&l| !self.ts.prime_lit(l)));
        match self.query(Cat::Pushing, &a)? {
            SatResult::Unsat(_) => Ok(Pushing::Holds),
            SatResult::Sat(m) => Ok(Pushing::Fails(self.ts.next_state(&m))),
        }
    }

    pub(crate) fn push_clause(&mut self, level: usize, c: &Clause) {
        self.frames.push_up(level, c);
        self.solver.add_clause(c, Some(level + 1));
    }

    /// Plain pushing over levels `from..=to`; returns the first level whose
    /// delta becomes empty.
    pub fn push_standard(&mut self, from: usize, to: usize) -> Result<Option<usize>, UnknownReason> {
        self.push_plain(from, to).map_err(Into::into)
    }

    pub(crate) fn push_plain(&mut self, from: usize, to: usize) -> Result<Option<usize>, Stop> {
        for i in from..=to {
            let lemmas: Vec<Clause> = self.frames.delta(i).cloned().collect();
            for c in lemmas {
                if !self.frames.delta_contains(i, &c) || self.unpushable.contains(&(i, c.clone())) {
                    continue;
                }
                if self.check_pushing(&c, i)? == Pushing::Holds {
                    self.push_clause(i, &c);
                }
            }
            if self.frames.delta_len(i) == 0 {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Copies the initial-state units that survive one transition into
    /// `F_1`; true when all do, so `I` itself is inductive.
    fn push_init(&mut self) -> Result<bool, Stop> {
        let mut all = true;
        for u in self.frames.init().to_vec() {
            if self.check_pushing(&u, 0)? == Pushing::Holds {
                self.add_lemma(u, 1);
            } else {
                all = false;
            }
        }
        Ok(all)
    }

    /// The 0-step check: is the initial state itself a target?
    fn base_case(&mut self) -> Option<Trace> {
        let init = self.ts.init_state().clone();
        let hit = match &self.goal {
            Goal::Avoid(s) => *s == init,
            Goal::Property => match self.ts.bad() {
                BadSignal::Never => false,
                BadSignal::Always => true,
                BadSignal::Lit(b) => {
                    let mut a = Self::state_lits(&init);
                    a.push(b);
                    self.stats.sat_calls.bad += 1;
                    matches!(self.lift.solve(&a), Ok(SatResult::Sat(_)))
                }
            },
        };
        if !hit {
            return None;
        }
        let mut t = Trace::single(init.clone());
        t.bad_inputs = self.bad_inputs_for(&init);
        Some(t)
    }

    /// Blocks every predecessor of a target state at level `k`.
    fn block_bad(&mut self, k: usize) -> Result<Option<Trace>, Stop> {
        let Some(target) = self.target_next() else { return Ok(None) };
        loop {
            let mut a = self.frame_lits(k);
            a.extend(&target);
            let m = match self.query(Cat::Bad, &a)? {
                SatResult::Unsat(_) => return Ok(None),
                SatResult::Sat(m) => m,
            };
            let p = self.ts.current_state(&m);
            let x = self.ts.inputs_of(&m, self.ts.input_vars());
            let (cube, bad_inputs) = match self.goal {
                Goal::Property => {
                    let xb = self.ts.inputs_of(&m, self.ts.bad_next_input_vars());
                    (self.lift_bad(&p, &x, &xb), Some(xb))
                }
                Goal::Avoid(_) => {
                    let c = self.target_cube();
                    (self.lift_to(&p, &x, &c), None)
                }
            };
            let root = ProofObligation { cube, level: k, depth: 0, successor: None, input: x };
            match self.block_root(root, Root::Pred { bad_inputs })? {
                BlockOutcome::Reached(t) => return Ok(Some(t)),
                BlockOutcome::Blocked => self.fix_pending()?,
            }
        }
    }

    fn target_cube(&self) -> Cube {
        match &self.goal {
            Goal::Avoid(s) => s.to_cube(),
            Goal::Property => unreachable!("property target is not a cube"),
        }
    }

    /// The clauses of `F_i` as an invariant of the goal.
    fn invariant_at(&self, i: usize) -> Invariant {
        let mut clauses = self.frames.lemmas(i);
        let includes_property = match &self.goal {
            Goal::Avoid(s) => {
                clauses.push(s.to_cube().negate());
                false
            }
            Goal::Property => match self.ts.prop_as_state_clause() {
                Some(p) => {
                    clauses.push(p);
                    false
                }
                None => self.ts.bad() != BadSignal::Never,
            },
        };
        clauses.sort();
        clauses.dedup();
        Invariant { clauses, includes_property }
    }

    fn finish_safe(&mut self, i: usize) -> Verdict {
        let inv = self.invariant_at(i);
        let q;
        let (assumed, target) = match &self.goal {
            Goal::Property => (Assumed::default(), Target::Property),
            Goal::Avoid(s) => {
                q = s.to_cube().negate();
                (Assumed { clauses: &self.constraint, weak_property: true }, Target::Clause(&q))
            }
        };
        match certify(self.ts, &inv, assumed, target, &self.opts.solver, self.opts.seed) {
            Ok(calls) => self.stats.sat_calls.certify += calls,
            Err(e) => panic!("invariant at level {i} fails certification: {e}"),
        }
        Verdict::Safe { invariant: inv, frames: self.frames.top() }
    }

    fn finish_unsafe(&mut self, t: Trace) -> Verdict {
        if self.goal == Goal::Property {
            if let Err(e) = validate_counterexample(self.ts, &t) {
                panic!("counterexample fails replay: {e}");
            }
        }
        Verdict::Unsafe { trace: t }
    }

    /// Runs to a verdict.
    pub fn run(&mut self) -> Verdict {
        let v = match self.run_loop() {
            Ok(v) => v,
            Err(s) => Verdict::Unknown { reason: s.into() },
        };
        self.stats.frames = self.frames.top();
        self.stats.clauses_per_frame = self.frames.sizes();
        self.stats.reach_generated = self.reach.generated() - self.reach_at_start;
        self.check_count_bound();
        v
    }

    fn run_loop(&mut self) -> Result<Verdict, Stop> {
        if let Some(t) = self.base_case() {
            return Ok(self.finish_unsafe(t));
        }
        let mut k = 0;
        loop {
            self.k = k;
            if self.opts.max_frames.is_some_and(|m| k > m) {
                return Ok(Verdict::Unknown { reason: UnknownReason::FrameLimit(k) });
            }
            if let Some(t) = self.block_bad(k)? {
                return Ok(self.finish_unsafe(t));
            }
            // F_k ∧ T → P′ now holds, so an F_k without own lemmas is P
            // itself and already inductive.
            if k >= 1 && self.frames.delta_len(k) == 0 {
                return Ok(self.finish_safe(k));
            }
            self.frames.open();
            if k == 0 && self.push_init()? {
                return Ok(self.finish_safe(1));
            }
            if k >= 1 {
                let fixed = match self.mode {
                    None => self.push_plain(1, k)?,
                    Some(mode) => match self.push_plain(1, k - 1)? {
                        Some(i) => Some(i),
                        None => self.new_push_inner(k, mode)?,
                    },
                };
                if let Some(i) = fixed {
                    return Ok(self.finish_safe(i));
                }
            }
            k += 1;
        }
    }

    /// Asserts the reachable-state count bounds of the effort modes.
    fn check_count_bound(&self) {
        let generated = self.reach.generated() - self.reach_at_start;
        let k = self.frames.top();
        let bound = match self.mode {
            None => return,
            Some(EffortMode::Minimal) => k * (k + 1) / 2,
            Some(_) => k * self.proofs.len(),
        };
        assert!(
            generated <= bound,
            "{} mode generated {generated} reachable states, bound {bound} at {k} frames",
            self.mode.map_or("", |m| m.name())
        );
    }
}

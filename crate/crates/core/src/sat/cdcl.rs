//! Conflict-driven clause learning with two watched literals, first-UIP
//! learning, VSIDS, phase saving, Luby restarts and assumption-based
//! incremental solving (failed assumptions are reported as the final
//! conflict).

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{IncrementalSolver, SolveStatus};
use crate::logic::{Lit, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LBool {
    True,
    False,
    Undef,
}

type CRef = u32;

struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: CRef,
    blocker: Lit,
}

/// Binary max-heap over variables keyed by activity.
#[derive(Default)]
struct VarHeap {
    heap: Vec<u32>,
    index: Vec<Option<usize>>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.index.resize(n, None);
    }

    fn contains(&self, v: u32) -> bool {
        self.index[v as usize].is_some()
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.index[v as usize] = Some(i);
        self.sift_up(i, act);
    }

    fn increased(&mut self, v: u32, act: &[f64]) {
        if let Some(i) = self.index[v as usize] {
            self.sift_up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.index[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.index[last as usize] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn better(a: u32, b: u32, act: &[f64]) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if !Self::better(v, self.heap[p], act) {
                break;
            }
            self.heap[i] = self.heap[p];
            self.index[self.heap[i] as usize] = Some(i);
            i = p;
        }
        self.heap[i] = v;
        self.index[v as usize] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && Self::better(self.heap[r], self.heap[l], act) {
                r
            } else {
                l
            };
            if !Self::better(self.heap[c], v, act) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.index[self.heap[i] as usize] = Some(i);
            i = c;
        }
        self.heap[i] = v;
        self.index[v as usize] = Some(i);
    }
}

/// `luby(y, x)`: the x-th element of the Luby sequence scaled by powers of y.
fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    let mut r = 1.0;
    for _ in 0..seq {
        r *= y;
    }
    r
}

pub struct Cdcl {
    clauses: Vec<ClauseData>,
    learnts: Vec<CRef>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<CRef>>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    seen: Vec<bool>,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    var_inc: f64,
    cla_inc: f64,
    ok: bool,
    assumptions: Vec<Lit>,
    /// Negations of the assumptions responsible for the last UNSAT answer.
    final_conflict: Vec<Lit>,
    model: Vec<LBool>,
    conflict_limit: Option<u64>,
    conflicts: u64,
    max_learnts: f64,
    rng: ChaCha8Rng,
}

const VAR_DECAY: f64 = 0.95;
const CLA_DECAY: f64 = 0.999;
const RESTART_FIRST: f64 = 100.0;

impl Cdcl {
    pub fn new(seed: u64) -> Cdcl {
        Cdcl {
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            activity: Vec::new(),
            seen: Vec::new(),
            heap: VarHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            var_inc: 1.0,
            cla_inc: 1.0,
            ok: true,
            assumptions: Vec::new(),
            final_conflict: Vec::new(),
            model: Vec::new(),
            conflict_limit: None,
            conflicts: 0,
            max_learnts: 1000.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    fn ensure_var(&mut self, v: Var) {
        let n = v.index() + 1;
        while self.assigns.len() < n {
            let idx = self.assigns.len();
            self.assigns.push(LBool::Undef);
            self.level.push(0);
            self.reason.push(None);
            self.polarity.push(false);
            // seed-dependent tie-breaking among equally active variables
            let jitter = (self.rng.next_u32() as f64) * 1e-12;
            self.activity.push(jitter);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.heap.grow(idx + 1);
            self.heap.insert(idx as u32, &self.activity);
        }
    }

    #[inline]
    fn value(&self, l: Lit) -> LBool {
        match self.assigns[l.var().index()] {
            LBool::Undef => LBool::Undef,
            LBool::True if l.is_positive() => LBool::True,
            LBool::False if !l.is_positive() => LBool::True,
            _ => LBool::False,
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, from: Option<CRef>) {
        let v = l.var().index();
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = if l.is_positive() { LBool::True } else { LBool::False };
        self.level[v] = self.decision_level();
        self.reason[v] = from;
        self.trail.push(l);
    }

    fn attach(&mut self, cref: CRef) {
        let c = &self.clauses[cref as usize];
        let (l0, l1) = (c.lits[0], c.lits[1]);
        self.watches[(!l0).code()].push(Watcher { cref, blocker: l1 });
        self.watches[(!l1).code()].push(Watcher { cref, blocker: l0 });
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl as usize];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            self.assigns[v] = LBool::Undef;
            self.reason[v] = None;
            self.polarity[v] = l.is_positive();
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = start;
    }

    fn propagate(&mut self) -> Option<CRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = core::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.clauses[w.cref as usize].deleted {
                    continue;
                }
                if self.value(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = &mut self.clauses[w.cref as usize];
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                let first = c.lits[0];
                let nw = Watcher { cref: w.cref, blocker: first };
                if first != w.blocker && self.value(first) == LBool::True {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let c = &self.clauses[w.cref as usize];
                let mut found = None;
                for k in 2..c.lits.len() {
                    if self.value(c.lits[k]) != LBool::False {
                        found = Some(k);
                        break;
                    }
                }
                if let Some(k) = found {
                    let c = &mut self.clauses[w.cref as usize];
                    c.lits.swap(1, k);
                    let nl = !c.lits[1];
                    self.watches[nl.code()].push(nw);
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.value(first) == LBool::False {
                    conflict = Some(w.cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: CRef) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis; returns the learnt clause (asserting
    /// literal first) and the backtrack level.
    fn analyze(&mut self, mut confl: CRef) -> (Vec<Lit>, u32) {
        let mut learnt = alloc::vec![Lit::from_code(0)];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            let lits = self.clauses[confl as usize].lits.clone();
            for &q in &lits[start..] {
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let pl = self.trail[index];
            p = Some(pl);
            self.seen[pl.var().index()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[pl.var().index()].expect("implied literal has a reason");
        }
        learnt[0] = !p.expect("uip");

        // local minimization: drop literals implied by other learnt literals
        let marked: Vec<usize> = learnt.iter().map(|l| l.var().index()).collect();
        let mut keep = alloc::vec![learnt[0]];
        for &l in &learnt[1..] {
            let redundant = match self.reason[l.var().index()] {
                None => false,
                Some(r) => self.clauses[r as usize].lits.iter().skip(1).all(|q| {
                    let v = q.var().index();
                    self.seen[v] || self.level[v] == 0
                }),
            };
            if !redundant {
                keep.push(l);
            }
        }
        for v in marked {
            self.seen[v] = false;
        }
        let mut learnt = keep;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index()]
        };
        (learnt, bt)
    }

    /// Collects the assumptions implying `p` (which is false under them).
    fn analyze_final(&mut self, p: Lit) {
        self.final_conflict.clear();
        self.final_conflict.push(p);
        if self.decision_level() == 0 {
            return;
        }
        self.seen[p.var().index()] = true;
        let start = self.trail_lim[0];
        for i in (start..self.trail.len()).rev() {
            let x = self.trail[i].var().index();
            if !self.seen[x] {
                continue;
            }
            match self.reason[x] {
                None => {
                    debug_assert!(self.level[x] > 0);
                    self.final_conflict.push(!self.trail[i]);
                }
                Some(r) => {
                    let lits = &self.clauses[r as usize].lits;
                    for q in &lits[1..] {
                        if self.level[q.var().index()] > 0 {
                            self.seen[q.var().index()] = true;
                        }
                    }
                }
            }
            self.seen[x] = false;
        }
        self.seen[p.var().index()] = false;
    }

    fn locked(&self, cref: CRef) -> bool {
        let c = &self.clauses[cref as usize];
        let l0 = c.lits[0];
        self.value(l0) == LBool::True && self.reason[l0.var().index()] == Some(cref)
    }

    fn reduce_db(&mut self) {
        let mut ls = core::mem::take(&mut self.learnts);
        ls.sort_by(|&a, &b| {
            let (x, y) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            (x.lits.len() <= 2)
                .cmp(&(y.lits.len() <= 2))
                .then(x.activity.partial_cmp(&y.activity).unwrap_or(core::cmp::Ordering::Equal))
        });
        let half = ls.len() / 2;
        let mut kept = Vec::with_capacity(ls.len());
        for (i, cref) in ls.into_iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i < half && c.lits.len() > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                c.lits = Vec::new();
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == LBool::Undef {
                return Some(Var(v).lit(self.polarity[v as usize]));
            }
        }
        None
    }

    fn search(&mut self, nof_conflicts: u64) -> LBool {
        let mut conflict_count = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                conflict_count += 1;
                if self.decision_level() == 0 {
                    return LBool::False;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let cref = self.clauses.len() as CRef;
                    let first = learnt[0];
                    self.clauses.push(ClauseData { lits: learnt, learnt: true, deleted: false, activity: 0.0 });
                    self.attach(cref);
                    self.learnts.push(cref);
                    self.bump_clause(cref);
                    self.enqueue(first, Some(cref));
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLA_DECAY;
            } else {
                if conflict_count >= nof_conflicts || self.budget_exhausted() {
                    self.cancel_until(0);
                    return LBool::Undef;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                }
                let mut next = None;
                while (self.decision_level() as usize) < self.assumptions.len() {
                    let p = self.assumptions[self.decision_level() as usize];
                    match self.value(p) {
                        LBool::True => self.trail_lim.push(self.trail.len()),
                        LBool::False => {
                            self.analyze_final(!p);
                            return LBool::False;
                        }
                        LBool::Undef => {
                            next = Some(p);
                            break;
                        }
                    }
                }
                let next = match next {
                    Some(p) => p,
                    None => match self.pick_branch() {
                        Some(p) => p,
                        None => return LBool::True,
                    },
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, None);
            }
        }
    }

    fn budget_exhausted(&self) -> bool {
        matches!(self.conflict_limit, Some(limit) if self.conflicts >= limit)
    }

    fn add_clause_inner(&mut self, lits: &[Lit]) {
        if !self.ok {
            return;
        }
        for &l in lits {
            self.ensure_var(l.var());
        }
        self.cancel_until(0);
        let mut ls: Vec<Lit> = lits.to_vec();
        ls.sort_unstable();
        ls.dedup();
        let mut out = Vec::with_capacity(ls.len());
        for (i, &l) in ls.iter().enumerate() {
            if i + 1 < ls.len() && ls[i + 1] == !l {
                return;
            }
            match self.value(l) {
                LBool::True => return,
                LBool::False => {}
                LBool::Undef => out.push(l),
            }
        }
        match out.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(out[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                let cref = self.clauses.len() as CRef;
                self.clauses.push(ClauseData { lits: out, learnt: false, deleted: false, activity: 0.0 });
                self.attach(cref);
            }
        }
    }

    fn solve_inner(&mut self) -> SolveStatus {
        self.model.clear();
        self.final_conflict.clear();
        for i in 0..self.assumptions.len() {
            let v = self.assumptions[i].var();
            self.ensure_var(v);
        }
        if !self.ok {
            self.assumptions.clear();
            return SolveStatus::Unsat;
        }
        self.max_learnts = (self.clauses.len() as f64 / 3.0).max(1000.0);
        let mut status = LBool::Undef;
        let mut restarts = 0u64;
        while status == LBool::Undef {
            if self.budget_exhausted() {
                break;
            }
            let budget = (luby(2.0, restarts) * RESTART_FIRST) as u64;
            status = self.search(budget);
            restarts += 1;
            self.max_learnts *= 1.05;
        }
        let result = match status {
            LBool::True => {
                self.model = self.assigns.clone();
                SolveStatus::Sat
            }
            LBool::False => {
                // a level-0 conflict leaves no failed assumptions: the clause
                // set itself is unsatisfiable
                if self.final_conflict.is_empty() {
                    self.ok = false;
                }
                SolveStatus::Unsat
            }
            LBool::Undef => SolveStatus::Unknown,
        };
        self.cancel_until(0);
        self.assumptions.clear();
        result
    }
}

impl IncrementalSolver for Cdcl {
    fn reserve_vars(&mut self, n: usize) {
        if n > 0 {
            self.ensure_var(Var(n as u32 - 1));
        }
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        self.add_clause_inner(lits);
    }

    fn assume(&mut self, lit: Lit) {
        self.assumptions.push(lit);
    }

    fn solve(&mut self) -> SolveStatus {
        self.solve_inner()
    }

    fn value(&self, lit: Lit) -> Option<bool> {
        match self.model.get(lit.var().index())? {
            LBool::Undef => None,
            LBool::True => Some(lit.is_positive()),
            LBool::False => Some(!lit.is_positive()),
        }
    }

    fn failed(&self, lit: Lit) -> bool {
        self.final_conflict.contains(&!lit)
    }

    fn set_conflict_limit(&mut self, limit: Option<u64>) {
        self.conflict_limit = limit.map(|l| self.conflicts + l);
    }

    fn conflicts(&self) -> u64 {
        self.conflicts
    }
}

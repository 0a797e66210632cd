//! Variables, literals, clauses, cubes and states.
//!
//! Clauses and cubes keep their literals sorted by variable index with at
//! most one literal per variable, so structural equality is semantic
//! equality of literal sets and subsumption is a linear merge.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Not;

use serde::{Deserialize, Serialize};

/// A propositional variable, identified by its index in the owning
/// variable table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn lit(self, positive: bool) -> Lit {
        Lit::new(self, positive)
    }
}

/// What a variable stands for inside a transition system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarRole {
    StateCurrent,
    StateNext,
    Input,
    Auxiliary,
}

/// A literal: variable plus polarity, packed as `var << 1 | negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense code usable as an index (`2 * var + negated`).
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }

    /// DIMACS form: 1-based variable number, negative when negated.
    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0) + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(d: i64) -> Option<Lit> {
        if d == 0 {
            return None;
        }
        let var = Var(u32::try_from(d.unsigned_abs() - 1).ok()?);
        Some(Lit::new(var, d > 0))
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "v{}", self.var().0)
        } else {
            write!(f, "!v{}", self.var().0)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LogicError {
    /// A clause would contain both polarities of this variable.
    Tautology(Var),
    /// A cube would contain both polarities of this variable.
    Contradiction(Var),
    /// The clause mentions a variable outside the state's domain.
    DomainMismatch { var: Var, domain: usize },
}

impl fmt::Display for LogicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicError::Tautology(v) => write!(f, "clause is tautological on variable {}", v.0),
            LogicError::Contradiction(v) => write!(f, "cube is contradictory on variable {}", v.0),
            LogicError::DomainMismatch { var, domain } => write!(
                f,
                "variable {} is outside the state domain of {} variables",
                var.0, domain
            ),
        }
    }
}

impl core::error::Error for LogicError {}

/// Sorts by variable, drops repeated literals, and reports the first
/// variable occurring in both polarities.
fn canonicalize(mut lits: Vec<Lit>) -> Result<Vec<Lit>, Var> {
    lits.sort_unstable();
    lits.dedup();
    for w in lits.windows(2) {
        if w[0].var() == w[1].var() {
            return Err(w[0].var());
        }
    }
    Ok(lits)
}

/// `a ⊆ b` for canonically sorted literal slices.
fn sorted_subset(a: &[Lit], b: &[Lit]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut j = 0;
    for &l in a {
        while j < b.len() && b[j] < l {
            j += 1;
        }
        if j == b.len() || b[j] != l {
            return false;
        }
        j += 1;
    }
    true
}

/// A disjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Clause, LogicError> {
        canonicalize(lits.into_iter().collect())
            .map(|lits| Clause { lits })
            .map_err(LogicError::Tautology)
    }

    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn unit(lit: Lit) -> Clause {
        Clause { lits: alloc::vec![lit] }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// The cube of states falsifying this clause.
    pub fn negate(&self) -> Cube {
        Cube {
            lits: self.lits.iter().map(|&l| !l).collect(),
        }
    }

    /// True iff every literal of `self` occurs in `other`, so `self` implies
    /// `other`.
    pub fn subsumes(&self, other: &Clause) -> bool {
        sorted_subset(&self.lits, &other.lits)
    }

    /// Renames variables; `f` must be injective on this clause's variables.
    pub fn map_vars(&self, mut f: impl FnMut(Var) -> Var) -> Clause {
        let lits = self
            .lits
            .iter()
            .map(|&l| Lit::new(f(l.var()), l.is_positive()))
            .collect();
        Clause::new_unchecked(lits)
    }

    fn new_unchecked(mut lits: Vec<Lit>) -> Clause {
        lits.sort_unstable();
        Clause { lits }
    }

    /// Evaluates the clause under a full assignment indexed by variable.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.lits
            .iter()
            .any(|l| assignment[l.var().index()] == l.is_positive())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lits {
            write!(f, "{} ", l.to_dimacs())?;
        }
        write!(f, "0")
    }
}

/// A conjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cube {
    lits: Vec<Lit>,
}

impl Cube {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Cube, LogicError> {
        canonicalize(lits.into_iter().collect())
            .map(|lits| Cube { lits })
            .map_err(LogicError::Contradiction)
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// The clause satisfied exactly by the assignments falsifying this cube.
    pub fn negate(&self) -> Clause {
        Clause {
            lits: self.lits.iter().map(|&l| !l).collect(),
        }
    }

    /// Sub-cube keeping only the literals accepted by `keep`.
    pub fn retain(&self, mut keep: impl FnMut(Lit) -> bool) -> Cube {
        Cube {
            lits: self.lits.iter().copied().filter(|&l| keep(l)).collect(),
        }
    }

    pub fn without(&self, index: usize) -> Cube {
        let mut lits = self.lits.clone();
        lits.remove(index);
        Cube { lits }
    }

    /// True iff the cube's literals are a subset of `other`'s, i.e. every
    /// state of `other` lies in `self`.
    pub fn contains_cube(&self, other: &Cube) -> bool {
        sorted_subset(&self.lits, &other.lits)
    }

    pub fn map_vars(&self, mut f: impl FnMut(Var) -> Var) -> Cube {
        let mut lits: Vec<Lit> = self
            .lits
            .iter()
            .map(|&l| Lit::new(f(l.var()), l.is_positive()))
            .collect();
        lits.sort_unstable();
        Cube { lits }
    }

    /// Whether the given state agrees with every literal.
    pub fn contains_state(&self, s: &State) -> bool {
        self.lits
            .iter()
            .all(|l| s.get(l.var().index()) == Some(l.is_positive()))
    }
}

/// A total assignment to the current-state variables `0..len`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct State(Vec<bool>);

impl State {
    pub fn new(bits: Vec<bool>) -> State {
        State(bits)
    }

    pub fn zeros(n: usize) -> State {
        State(alloc::vec![false; n])
    }

    /// Little-endian unpacking of `bits` into `n` variables.
    pub fn from_bits(bits: u64, n: usize) -> State {
        State((0..n).map(|i| bits >> i & 1 == 1).collect())
    }

    pub fn to_bits(&self) -> u64 {
        debug_assert!(self.0.len() <= 64);
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | u64::from(b) << i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// The cube with one literal per state variable satisfied only by this
    /// state.
    pub fn to_cube(&self) -> Cube {
        Cube {
            lits: self
                .0
                .iter()
                .enumerate()
                .map(|(i, &b)| Lit::new(Var(i as u32), b))
                .collect(),
        }
    }

    /// Whether this state is a model of `cl`.
    pub fn satisfies(&self, cl: &Clause) -> Result<bool, LogicError> {
        let mut sat = false;
        for l in cl.lits() {
            match self.get(l.var().index()) {
                Some(v) => sat |= v == l.is_positive(),
                None => {
                    return Err(LogicError::DomainMismatch {
                        var: l.var(),
                        domain: self.len(),
                    })
                }
            }
        }
        Ok(sat)
    }

    /// Whether this state satisfies every clause; domain errors count as
    /// failure.
    pub fn satisfies_all<'a>(&self, clauses: impl IntoIterator<Item = &'a Clause>) -> bool {
        clauses
            .into_iter()
            .all(|c| self.satisfies(c).unwrap_or(false))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// One assignment to the primary inputs for a single step.
pub type InputVec = Vec<bool>;

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn l(v: u32, pos: bool) -> Lit {
        Var(v).lit(pos)
    }

    #[test]
    fn negate_cube_flips_polarities() {
        let c = Cube::new([l(0, true), l(1, false)]).unwrap();
        assert_eq!(c.negate(), Clause::new([l(0, false), l(1, true)]).unwrap());
    }

    #[test]
    fn negate_empty_cube_is_empty_clause() {
        let c = Cube::new([]).unwrap();
        assert!(c.negate().is_empty());
        let s = State::new(vec![true, false]);
        assert!(!s.satisfies(&c.negate()).unwrap());
    }

    #[test]
    fn negate_is_involution() {
        let c = Cube::new([l(0, true)]).unwrap();
        assert_eq!(c.negate(), Clause::unit(l(0, false)));
        assert_eq!(c.negate().negate(), c);
    }

    #[test]
    fn state_to_cube() {
        let s = State::new(vec![true, false]);
        assert_eq!(s.to_cube().lits(), &[l(0, true), l(1, false)]);
        assert_eq!(State::new(vec![false]).to_cube().lits(), &[l(0, false)]);
        let all = State::new(vec![true; 3]).to_cube();
        assert_eq!(all.lits(), &[l(0, true), l(1, true), l(2, true)]);
    }

    #[test]
    fn satisfies_examples() {
        let cl = Clause::new([l(0, false), l(1, false)]).unwrap();
        assert!(State::new(vec![true, false]).satisfies(&cl).unwrap());
        assert!(!State::new(vec![true, true]).satisfies(&cl).unwrap());
        assert!(!State::new(vec![true, true]).satisfies(&Clause::empty()).unwrap());
    }

    #[test]
    fn satisfies_reports_domain_mismatch() {
        let cl = Clause::unit(l(5, true));
        assert_eq!(
            State::new(vec![true]).satisfies(&cl),
            Err(LogicError::DomainMismatch { var: Var(5), domain: 1 })
        );
    }

    #[test]
    fn subsumes_examples() {
        let a = Clause::unit(l(0, false));
        let b = Clause::new([l(0, false), l(1, true)]).unwrap();
        assert!(a.subsumes(&b));
        assert!(!b.subsumes(&a));
        assert!(b.subsumes(&b.clone()));
    }

    #[test]
    fn tautologies_rejected() {
        assert_eq!(
            Clause::new([l(2, true), l(2, false)]),
            Err(LogicError::Tautology(Var(2)))
        );
        // repeated literal is not a tautology
        assert_eq!(Clause::new([l(2, true), l(2, true)]).unwrap().len(), 1);
    }

    #[test]
    fn dimacs_roundtrip() {
        assert_eq!(l(0, true).to_dimacs(), 1);
        assert_eq!(l(3, false).to_dimacs(), -4);
        assert_eq!(Lit::from_dimacs(-4), Some(l(3, false)));
        assert_eq!(Lit::from_dimacs(0), None);
    }

    fn arb_clause(nvars: u32) -> impl Strategy<Value = Clause> {
        proptest::collection::btree_map(0..nvars, any::<bool>(), 0..=nvars as usize)
            .prop_map(|m| Clause::new(m.into_iter().map(|(v, p)| l(v, p))).unwrap())
    }

    fn arb_state(nvars: usize) -> impl Strategy<Value = State> {
        proptest::collection::vec(any::<bool>(), nvars).prop_map(State::new)
    }

    proptest! {
        #[test]
        fn negated_cube_satisfied_iff_state_outside_cube(c in arb_clause(6), s in arb_state(6)) {
            let cube = c.negate();
            let sat = s.satisfies(&cube.negate()).unwrap();
            prop_assert!(sat ^ cube.contains_state(&s));
        }

        #[test]
        fn canonical_form_is_idempotent(lits in proptest::collection::vec((0u32..8, any::<bool>()), 0..10)) {
            if let Ok(c) = Clause::new(lits.iter().map(|&(v, p)| l(v, p))) {
                let again = Clause::new(c.lits().iter().rev().copied()).unwrap();
                prop_assert_eq!(again, c);
            }
        }

        #[test]
        fn subsumption_is_reflexive_and_transitive(a in arb_clause(5), b in arb_clause(5), c in arb_clause(5)) {
            prop_assert!(a.subsumes(&a));
            if a.subsumes(&b) && b.subsumes(&c) {
                prop_assert!(a.subsumes(&c));
            }
        }

        #[test]
        fn subsumption_implies_entailment(a in arb_clause(4), b in arb_clause(4), s in arb_state(4)) {
            if a.subsumes(&b) && s.satisfies(&a).unwrap() {
                prop_assert!(s.satisfies(&b).unwrap());
            }
        }
    }
}

//! CNF transition systems built from AIG circuits.
//!
//! Variable layout: latch `i` is current-state variable `i` and next-state
//! variable `L + i`, so priming is an index shift. Inputs and gate outputs
//! follow. The bad cone is instantiated three times: inside `trans` on the
//! transition copy (for next-state functions), inside `trans` on next-state
//! variables (so `F ∧ T ∧ bad′` is one query), and in `prop_defs` on
//! current-state variables. Each cone copy gets its own input variables, so
//! the property reads "no input raises bad" while queries stay existential.

use alloc::string::String;
use alloc::vec::Vec;

use crate::aig::{AigCircuit, AigLit};
use crate::logic::{Clause, Cube, InputVec, Lit, State, Var, VarRole};

/// Which instance of the circuit logic a variable belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Copy {
    Transition,
    PropertyCurrent,
    PropertyNext,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarOrigin {
    LatchCurrent(usize),
    LatchNext(usize),
    Input { index: usize, copy: Copy },
    Gate { aig_var: u32, copy: Copy },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarInfo {
    pub role: VarRole,
    pub origin: VarOrigin,
}

/// The bad signal after constant folding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BadSignal {
    Never,
    Always,
    Lit(Lit),
}

#[derive(Clone, Debug)]
pub struct TransitionSystem {
    pub name: String,
    circuit: AigCircuit,
    vars: Vec<VarInfo>,
    inputs: Vec<Var>,
    init: Vec<Clause>,
    init_state: State,
    trans: Vec<Clause>,
    prop_defs: Vec<Clause>,
    bad: BadSignal,
    bad_next: BadSignal,
    bad_inputs: Vec<Var>,
    bad_next_inputs: Vec<Var>,
}

#[derive(Clone, Copy)]
enum Mapped {
    Const(bool),
    Lit(Lit),
}

impl Mapped {
    fn negate_if(self, neg: bool) -> Mapped {
        match self {
            Mapped::Const(b) => Mapped::Const(b ^ neg),
            Mapped::Lit(l) => Mapped::Lit(if neg { !l } else { l }),
        }
    }
}

struct Encoder<'a> {
    circuit: &'a AigCircuit,
    vars: Vec<VarInfo>,
}

impl Encoder<'_> {
    fn fresh(&mut self, role: VarRole, origin: VarOrigin) -> Var {
        let v = Var(self.vars.len() as u32);
        self.vars.push(VarInfo { role, origin });
        v
    }

    /// Instantiates the gates in `cone` with latches mapped to `latch_base +
    /// i`. Inputs in the cone get fresh variables of this copy unless
    /// `inputs` already provides them. Returns the AIG-variable map.
    fn instantiate(
        &mut self,
        cone: &[bool],
        latch_base: u32,
        copy: Copy,
        inputs: &mut Vec<Var>,
        clauses: &mut Vec<Clause>,
    ) -> Vec<Option<Mapped>> {
        let c = self.circuit;
        let mut map: Vec<Option<Mapped>> = alloc::vec![None; c.max_var as usize + 1];
        map[0] = Some(Mapped::Const(false));
        for (i, l) in c.latches.iter().enumerate() {
            map[l.lit.var() as usize] = Some(Mapped::Lit(Var(latch_base + i as u32).lit(true)));
        }
        let reads_input = c.inputs.iter().any(|i| cone[i.var() as usize]);
        if inputs.is_empty() && reads_input {
            for index in 0..c.inputs.len() {
                let v = self.fresh(VarRole::Input, VarOrigin::Input { index, copy });
                inputs.push(v);
            }
        }
        if !inputs.is_empty() {
            for (i, lit) in c.inputs.iter().enumerate() {
                map[lit.var() as usize] = Some(Mapped::Lit(inputs[i].lit(true)));
            }
        }
        let lookup = |map: &[Option<Mapped>], l: AigLit| {
            map[l.var() as usize]
                .expect("operand mapped before use")
                .negate_if(l.is_negated())
        };
        for g in c.topological_ands() {
            if !cone[g.lhs.var() as usize] {
                continue;
            }
            let a = lookup(&map, g.rhs0);
            let b = lookup(&map, g.rhs1);
            let out = match (a, b) {
                (Mapped::Const(false), _) | (_, Mapped::Const(false)) => Mapped::Const(false),
                (Mapped::Const(true), x) | (x, Mapped::Const(true)) => x,
                (Mapped::Lit(a), Mapped::Lit(b)) => {
                    let x = self
                        .fresh(VarRole::Auxiliary, VarOrigin::Gate { aig_var: g.lhs.var(), copy })
                        .lit(true);
                    for lits in [[!x, a].as_slice(), &[!x, b], &[x, !a, !b]] {
                        if let Ok(cl) = Clause::new(lits.iter().copied()) {
                            clauses.push(cl);
                        }
                    }
                    Mapped::Lit(x)
                }
            };
            map[g.lhs.var() as usize] = Some(out);
        }
        map
    }
}

fn bad_signal(map: &[Option<Mapped>], bad: AigLit) -> BadSignal {
    match map[bad.var() as usize]
        .expect("bad literal mapped")
        .negate_if(bad.is_negated())
    {
        Mapped::Const(false) => BadSignal::Never,
        Mapped::Const(true) => BadSignal::Always,
        Mapped::Lit(l) => BadSignal::Lit(l),
    }
}

impl TransitionSystem {
    /// Tseitin-encodes a validated circuit.
    pub fn encode(circuit: &AigCircuit, name: impl Into<String>) -> TransitionSystem {
        let nl = circuit.num_latches();
        let mut enc = Encoder { circuit, vars: Vec::new() };
        for i in 0..nl {
            enc.fresh(VarRole::StateCurrent, VarOrigin::LatchCurrent(i));
        }
        for i in 0..nl {
            enc.fresh(VarRole::StateNext, VarOrigin::LatchNext(i));
        }
        let mut inputs = Vec::new();
        for index in 0..circuit.num_inputs() {
            let v = enc.fresh(VarRole::Input, VarOrigin::Input { index, copy: Copy::Transition });
            inputs.push(v);
        }

        let mut trans = Vec::new();
        let mut next_cone = alloc::vec![false; circuit.max_var as usize + 1];
        for l in &circuit.latches {
            let support = circuit.cone_support(l.next);
            for (m, s) in next_cone.iter_mut().zip(support) {
                *m |= s;
            }
        }
        let map = enc.instantiate(&next_cone, 0, Copy::Transition, &mut inputs, &mut trans);
        for (i, l) in circuit.latches.iter().enumerate() {
            let n = Var((nl + i) as u32).lit(true);
            let f = map[l.next.var() as usize]
                .expect("next function mapped")
                .negate_if(l.next.is_negated());
            match f {
                Mapped::Const(b) => trans.push(Clause::unit(if b { n } else { !n })),
                Mapped::Lit(f) => {
                    for lits in [[!n, f], [n, !f]] {
                        if let Ok(cl) = Clause::new(lits) {
                            trans.push(cl);
                        }
                    }
                }
            }
        }

        let bad_cone = circuit.cone_support(circuit.bad);
        let mut next_inputs = Vec::new();
        let next_map = enc.instantiate(&bad_cone, nl as u32, Copy::PropertyNext, &mut next_inputs, &mut trans);
        let bad_next = bad_signal(&next_map, circuit.bad);

        let mut prop_defs = Vec::new();
        let mut bad_inputs = Vec::new();
        let cur_map = enc.instantiate(&bad_cone, 0, Copy::PropertyCurrent, &mut bad_inputs, &mut prop_defs);
        let bad = bad_signal(&cur_map, circuit.bad);

        let init_state = circuit.reset_state();
        let init = init_state
            .to_cube()
            .lits()
            .iter()
            .map(|&l| Clause::unit(l))
            .collect();

        TransitionSystem {
            name: name.into(),
            circuit: circuit.clone(),
            vars: enc.vars,
            inputs,
            init,
            init_state,
            trans,
            prop_defs,
            bad,
            bad_next,
            bad_inputs,
            bad_next_inputs: next_inputs,
        }
    }

    pub fn circuit(&self) -> &AigCircuit {
        &self.circuit
    }

    pub fn num_latches(&self) -> usize {
        self.circuit.num_latches()
    }

    pub fn num_inputs(&self) -> usize {
        self.circuit.num_inputs()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_info(&self, v: Var) -> VarInfo {
        self.vars[v.index()]
    }

    pub fn role(&self, v: Var) -> VarRole {
        self.vars[v.index()].role
    }

    pub fn state_vars(&self) -> impl Iterator<Item = Var> {
        (0..self.num_latches() as u32).map(Var)
    }

    /// Input variables of the transition copy.
    pub fn input_vars(&self) -> &[Var] {
        &self.inputs
    }

    /// Input variables read by the current-state property copy; empty when
    /// the bad cone reads no inputs.
    pub fn bad_input_vars(&self) -> &[Var] {
        &self.bad_inputs
    }

    /// Input variables read by the next-state bad copy inside `trans`.
    pub fn bad_next_input_vars(&self) -> &[Var] {
        &self.bad_next_inputs
    }

    /// Initial-state clauses `I`: one unit per latch.
    pub fn init(&self) -> &[Clause] {
        &self.init
    }

    pub fn init_state(&self) -> &State {
        &self.init_state
    }

    /// Transition clauses `T`.
    pub fn trans(&self) -> &[Clause] {
        &self.trans
    }

    /// Definitions of the current-state bad cone (functional, always
    /// satisfiable).
    pub fn prop_defs(&self) -> &[Clause] {
        &self.prop_defs
    }

    pub fn bad(&self) -> BadSignal {
        self.bad
    }

    pub fn bad_next(&self) -> BadSignal {
        self.bad_next
    }

    /// Property clauses `P`: the cone definitions plus `¬bad`.
    pub fn prop(&self) -> Vec<Clause> {
        let mut p = self.prop_defs.clone();
        match self.bad {
            BadSignal::Never => {}
            BadSignal::Always => p.push(Clause::empty()),
            BadSignal::Lit(b) => p.push(Clause::unit(!b)),
        }
        p
    }

    /// Whether `P` reduces to a single clause over latches, as it does when
    /// the bad output is a latch literal.
    pub fn prop_as_state_clause(&self) -> Option<Clause> {
        match self.bad {
            BadSignal::Never => None,
            BadSignal::Always => Some(Clause::empty()),
            BadSignal::Lit(b) if self.role(b.var()) == VarRole::StateCurrent => Some(Clause::unit(!b)),
            BadSignal::Lit(_) => None,
        }
    }

    pub fn prime(&self, v: Var) -> Var {
        debug_assert_eq!(self.role(v), VarRole::StateCurrent);
        Var(v.0 + self.num_latches() as u32)
    }

    pub fn prime_lit(&self, l: Lit) -> Lit {
        Lit::new(self.prime(l.var()), l.is_positive())
    }

    pub fn prime_cube(&self, c: &Cube) -> Cube {
        c.map_vars(|v| self.prime(v))
    }

    pub fn prime_clause(&self, c: &Clause) -> Clause {
        c.map_vars(|v| self.prime(v))
    }

    pub fn unprime_lit(&self, l: Lit) -> Lit {
        debug_assert_eq!(self.role(l.var()), VarRole::StateNext);
        Lit::new(Var(l.var().0 - self.num_latches() as u32), l.is_positive())
    }

    /// Whether the cube contains the initial state.
    pub fn cube_meets_init(&self, c: &Cube) -> bool {
        c.contains_state(&self.init_state)
    }

    pub fn step(&self, s: &State, inputs: &[bool]) -> State {
        self.circuit.step(s, inputs)
    }

    pub fn is_bad(&self, s: &State, inputs: &[bool]) -> bool {
        self.circuit.is_bad(s, inputs)
    }

    /// `P(s)`: no input assignment raises bad at `s`.
    pub fn satisfies_prop(&self, s: &State) -> bool {
        self.circuit.bad_input(s).is_none()
    }

    pub fn bad_input(&self, s: &State) -> Option<InputVec> {
        self.circuit.bad_input(s)
    }
}

/// Projections of a total model onto the variable copies.
impl TransitionSystem {
    pub fn current_state(&self, model: &[bool]) -> State {
        State::new(model[..self.num_latches()].to_vec())
    }

    pub fn next_state(&self, model: &[bool]) -> State {
        let l = self.num_latches();
        State::new(model[l..2 * l].to_vec())
    }

    pub fn inputs_of(&self, model: &[bool], vars: &[Var]) -> InputVec {
        if vars.is_empty() {
            return alloc::vec![false; self.num_inputs()];
        }
        vars.iter().map(|v| model[v.index()]).collect()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    pub use crate::fixtures::*;

    pub fn s(bits: &[u8]) -> crate::logic::State {
        state_of(bits)
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::aig::{AigLit, Latch};
    use alloc::vec;

    #[test]
    fn fixtures_validate() {
        for c in [stuck(), sat3(), cnt4()] {
            c.validate().unwrap();
        }
    }

    #[test]
    fn sat3_next_state_table() {
        let c = sat3();
        // (l0, l1) → (l0 ∨ ¬l1, l1 ∨ l0)
        assert_eq!(c.step(&s(&[0, 0]), &[]), s(&[1, 0]));
        assert_eq!(c.step(&s(&[1, 0]), &[]), s(&[1, 1]));
        assert_eq!(c.step(&s(&[0, 1]), &[]), s(&[0, 1]));
        assert_eq!(c.step(&s(&[1, 1]), &[]), s(&[1, 1]));
    }

    #[test]
    fn cnt4_counts() {
        let c = cnt4();
        let mut st = s(&[0, 0]);
        let mut seen = vec![];
        for _ in 0..4 {
            seen.push(st.clone());
            st = c.step(&st, &[]);
        }
        assert_eq!(seen, vec![s(&[0, 0]), s(&[1, 0]), s(&[0, 1]), s(&[1, 1])]);
        assert!(c.is_bad(&s(&[1, 1]), &[]));
    }

    #[test]
    fn constant_next_gives_unit_binding() {
        let c = AigCircuit {
            max_var: 2,
            inputs: vec![],
            latches: vec![
                Latch { lit: AigLit(2), next: AigLit(0), reset: false },
                Latch { lit: AigLit(4), next: AigLit(0), reset: true },
            ],
            ands: vec![],
            bad: AigLit(2),
            symbols: vec![],
            comments: vec![],
        };
        let ts = TransitionSystem::encode(&c, "const");
        assert_eq!(ts.trans().len(), 2);
        assert!(ts.trans().iter().all(|cl| cl.len() == 1));
        assert_eq!(ts.init_state(), &s(&[0, 1]));
    }

    #[test]
    fn constant_false_bad_gives_empty_property() {
        let mut c = stuck();
        c.bad = AigLit::FALSE;
        let ts = TransitionSystem::encode(&c, "never");
        assert!(ts.prop().is_empty());
        assert_eq!(ts.bad(), BadSignal::Never);
        assert_eq!(ts.bad_next(), BadSignal::Never);
    }

    #[test]
    fn and_gates_get_three_clauses() {
        let ts = TransitionSystem::encode(&sat3(), "sat3");
        // transition copy: 2 gates × 3 clauses + 2 latches × 2 binding clauses,
        // next-state bad cone: 1 gate × 3 clauses
        assert_eq!(ts.trans().len(), 6 + 4 + 3);
        assert_eq!(ts.prop_defs().len(), 3);
        assert_eq!(ts.prop().len(), 4);
    }

    #[test]
    fn latch_bad_is_state_clause() {
        let ts = TransitionSystem::encode(&stuck(), "stuck");
        assert_eq!(ts.prop_as_state_clause(), Some(Clause::unit(Var(0).lit(false))));
        assert_eq!(ts.bad_next(), BadSignal::Lit(Var(1).lit(true)));
    }
}

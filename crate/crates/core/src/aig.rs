//! And-inverter graph circuits with latches and a single bad-state output.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::logic::{InputVec, State};

/// AIGER literal: `2 * variable + negated`; 0 is false and 1 is true.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AigLit(pub u32);

impl AigLit {
    pub const FALSE: AigLit = AigLit(0);
    pub const TRUE: AigLit = AigLit(1);

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_const(self) -> bool {
        self.0 < 2
    }

    pub fn negate(self) -> AigLit {
        AigLit(self.0 ^ 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Latch {
    pub lit: AigLit,
    pub next: AigLit,
    /// Reset value; an absent reset in the file means 0.
    pub reset: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AndGate {
    pub lhs: AigLit,
    pub rhs0: AigLit,
    pub rhs1: AigLit,
}

/// Symbol table entry kinds as they appear in AIGER files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Input,
    Latch,
    Output,
    Bad,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub kind: SymbolKind,
    pub index: usize,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AigCircuit {
    pub max_var: u32,
    pub inputs: Vec<AigLit>,
    pub latches: Vec<Latch>,
    pub ands: Vec<AndGate>,
    pub bad: AigLit,
    pub symbols: Vec<Symbol>,
    pub comments: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AigError {
    LiteralOutOfRange(AigLit),
    NegatedDefinition(AigLit),
    Redefined(u32),
    /// An AND operand is not strictly smaller than its output.
    NotTopological(AndGate),
    UndefinedOperand(AigLit),
}

impl fmt::Display for AigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AigError::LiteralOutOfRange(l) => write!(f, "literal {} exceeds the maximum variable index", l.0),
            AigError::NegatedDefinition(l) => write!(f, "defined literal {} must be even", l.0),
            AigError::Redefined(v) => write!(f, "variable {v} is defined more than once"),
            AigError::NotTopological(g) => write!(
                f,
                "AND gate {} {} {} violates topological order",
                g.lhs.0, g.rhs0.0, g.rhs1.0
            ),
            AigError::UndefinedOperand(l) => write!(f, "literal {} is used but never defined", l.0),
        }
    }
}

impl core::error::Error for AigError {}

impl AigCircuit {
    /// Checks AIGER structural invariants: even, unique definitions within
    /// range, AND operands strictly below their output, and every used
    /// variable defined.
    pub fn validate(&self) -> Result<(), AigError> {
        let mut defined = alloc::vec![false; self.max_var as usize + 1];
        defined[0] = true;
        let mut define = |lit: AigLit| -> Result<(), AigError> {
            if lit.var() > self.max_var || lit.var() == 0 {
                return Err(AigError::LiteralOutOfRange(lit));
            }
            if lit.is_negated() {
                return Err(AigError::NegatedDefinition(lit));
            }
            let slot = &mut defined[lit.var() as usize];
            if *slot {
                return Err(AigError::Redefined(lit.var()));
            }
            *slot = true;
            Ok(())
        };
        for &i in &self.inputs {
            define(i)?;
        }
        for l in &self.latches {
            define(l.lit)?;
        }
        for g in &self.ands {
            define(g.lhs)?;
            if g.rhs0.0 >= g.lhs.0 || g.rhs1.0 >= g.lhs.0 {
                return Err(AigError::NotTopological(*g));
            }
        }
        let used = self
            .latches
            .iter()
            .map(|l| l.next)
            .chain(self.ands.iter().flat_map(|g| [g.rhs0, g.rhs1]))
            .chain(core::iter::once(self.bad));
        for lit in used {
            if lit.var() > self.max_var {
                return Err(AigError::LiteralOutOfRange(lit));
            }
            if !defined[lit.var() as usize] {
                return Err(AigError::UndefinedOperand(lit));
            }
        }
        Ok(())
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_latches(&self) -> usize {
        self.latches.len()
    }

    pub fn reset_state(&self) -> State {
        State::new(self.latches.iter().map(|l| l.reset).collect())
    }

    /// AND gates in an order where operands precede outputs.
    pub fn topological_ands(&self) -> Vec<AndGate> {
        let mut gates = self.ands.clone();
        gates.sort_by_key(|g| g.lhs);
        gates
    }

    /// Variable values for one combinational evaluation.
    pub fn evaluate(&self, state: &State, inputs: &[bool]) -> Evaluation {
        let mut values = alloc::vec![false; self.max_var as usize + 1];
        for (i, lit) in self.inputs.iter().enumerate() {
            values[lit.var() as usize] = inputs[i];
        }
        for (i, l) in self.latches.iter().enumerate() {
            values[l.lit.var() as usize] = state.bits()[i];
        }
        for g in self.topological_ands() {
            let v = lit_value(&values, g.rhs0) && lit_value(&values, g.rhs1);
            values[g.lhs.var() as usize] = v;
        }
        Evaluation { values }
    }

    /// Successor state under the given inputs.
    pub fn step(&self, state: &State, inputs: &[bool]) -> State {
        let ev = self.evaluate(state, inputs);
        State::new(self.latches.iter().map(|l| ev.value(l.next)).collect())
    }

    /// Value of the bad output at `state` under `inputs`.
    pub fn is_bad(&self, state: &State, inputs: &[bool]) -> bool {
        self.evaluate(state, inputs).value(self.bad)
    }

    /// True iff some input assignment raises the bad output at `state`.
    /// Enumerates all `2^inputs` assignments when the bad cone reads inputs.
    pub fn bad_input(&self, state: &State) -> Option<InputVec> {
        let n = self.num_inputs();
        let assignments = if self.bad_reads_inputs() { 1u64 << n } else { 1 };
        (0..assignments)
            .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<InputVec>())
            .find(|x| self.is_bad(state, x))
    }

    /// Whether the bad output depends on any primary input.
    pub fn bad_reads_inputs(&self) -> bool {
        let support = self.cone_support(self.bad);
        self.inputs.iter().any(|i| support[i.var() as usize])
    }

    /// Marks every variable in the transitive fan-in of `root`.
    pub fn cone_support(&self, root: AigLit) -> Vec<bool> {
        let mut by_lhs = alloc::vec![None; self.max_var as usize + 1];
        for g in &self.ands {
            by_lhs[g.lhs.var() as usize] = Some(*g);
        }
        let mut mark = alloc::vec![false; self.max_var as usize + 1];
        let mut stack = alloc::vec![root.var()];
        while let Some(v) = stack.pop() {
            if v == 0 || mark[v as usize] {
                continue;
            }
            mark[v as usize] = true;
            if let Some(g) = by_lhs[v as usize] {
                stack.push(g.rhs0.var());
                stack.push(g.rhs1.var());
            }
        }
        mark
    }
}

fn lit_value(values: &[bool], lit: AigLit) -> bool {
    values[lit.var() as usize] ^ lit.is_negated()
}

pub struct Evaluation {
    values: Vec<bool>,
}

impl Evaluation {
    pub fn value(&self, lit: AigLit) -> bool {
        lit_value(&self.values, lit)
    }
}

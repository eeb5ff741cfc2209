//! Compilation of policies to a pair of Boolean circuits (grant rail, deny
//! rail) over dual-rail atom inputs, and their evaluation.
//!
//! Each atom `i` enters the circuit as two wires `(t_i, f_i)`: `(1,0)` true,
//! `(0,1)` false, `(0,0)` unknown. Strong Kleene connectives are realised on
//! the rails, so the circuits themselves stay two-valued.

mod compile;
mod eval;
mod format;

use std::collections::HashMap;

use crate::ast::Atom;
use crate::decision::{Decision, Kleene};

pub use compile::{collect_atoms, collect_atoms_into, compile_policy, CircuitBuilder};
pub use eval::{eval_circuit, Evaluator};
pub use format::{deserialize_circuit, serialize_circuit, FormatError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("unresolved policy reference `{0}`")]
    UnresolvedRef(String),
    #[error("reference cycle through `{0}`")]
    Cycle(String),
    #[error("rail assignment covers {got} atoms but the circuit has {expected}")]
    MissingAtoms { expected: usize, got: usize },
    #[error("atom {0} has both rails set")]
    RailConflict(usize),
    #[error("gate {gate} references gate {operand}, which does not precede it")]
    ForwardReference { gate: usize, operand: usize },
    #[error("gate {gate} reads atom {atom}, but the table has {atoms} atoms")]
    BadAtomIndex { gate: usize, atom: usize, atoms: usize },
    #[error("output index {0} is out of range")]
    BadOutput(usize),
    #[error("circuit has no gates")]
    Empty,
}

/// Duplicate-free, ordered table of the atoms a circuit reads.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AtomTable {
    atoms: Vec<Atom>,
    index: HashMap<String, usize>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `atom`, adding it if unseen.
    pub fn intern(&mut self, atom: &Atom) -> usize {
        let key = atom.canonical();
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.atoms.len();
        self.atoms.push(atom.clone());
        self.index.insert(key, i);
        i
    }

    pub fn position(&self, atom: &Atom) -> Option<usize> {
        self.index.get(&atom.canonical()).copied()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    TrueRail(usize),
    FalseRail(usize),
    Const0,
    Const1,
    And(usize, usize),
    Or(usize, usize),
    Not(usize),
}

impl Gate {
    fn operands(self) -> impl Iterator<Item = usize> {
        let (a, b) = match self {
            Gate::And(l, r) | Gate::Or(l, r) => (Some(l), Some(r)),
            Gate::Not(x) => (Some(x), None),
            _ => (None, None),
        };
        a.into_iter().chain(b)
    }
}

/// Two output wires over a shared, topologically ordered gate list.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCircuit {
    table: AtomTable,
    gates: Vec<Gate>,
    grant_out: usize,
    deny_out: usize,
}

impl DualCircuit {
    /// Checks topological order, atom indices and outputs.
    pub fn new(
        table: AtomTable,
        gates: Vec<Gate>,
        grant_out: usize,
        deny_out: usize,
    ) -> Result<Self, CircuitError> {
        if gates.is_empty() {
            return Err(CircuitError::Empty);
        }
        for (i, g) in gates.iter().enumerate() {
            if let Some(operand) = g.operands().find(|&o| o >= i) {
                return Err(CircuitError::ForwardReference { gate: i, operand });
            }
            if let Gate::TrueRail(a) | Gate::FalseRail(a) = *g {
                if a >= table.len() {
                    return Err(CircuitError::BadAtomIndex {
                        gate: i,
                        atom: a,
                        atoms: table.len(),
                    });
                }
            }
        }
        for out in [grant_out, deny_out] {
            if out >= gates.len() {
                return Err(CircuitError::BadOutput(out));
            }
        }
        Ok(DualCircuit {
            table,
            gates,
            grant_out,
            deny_out,
        })
    }

    pub fn table(&self) -> &AtomTable {
        &self.table
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn grant_out(&self) -> usize {
        self.grant_out
    }

    pub fn deny_out(&self) -> usize {
        self.deny_out
    }

    /// Same gates and table, different output wires.
    pub fn with_outputs(&self, grant_out: usize, deny_out: usize) -> Result<Self, CircuitError> {
        DualCircuit::new(self.table.clone(), self.gates.clone(), grant_out, deny_out)
    }
}

/// Rail pair for one atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rail {
    pub t: bool,
    pub f: bool,
}

impl Rail {
    pub const TRUE: Rail = Rail { t: true, f: false };
    pub const FALSE: Rail = Rail { t: false, f: true };
    pub const UNKNOWN: Rail = Rail { t: false, f: false };

    pub fn from_kleene(k: Kleene) -> Rail {
        match k {
            Kleene::True => Rail::TRUE,
            Kleene::False => Rail::FALSE,
            Kleene::Unknown => Rail::UNKNOWN,
        }
    }

    /// `None` for the forbidden `(1,1)` pair.
    pub fn kleene(self) -> Option<Kleene> {
        match (self.t, self.f) {
            (true, false) => Some(Kleene::True),
            (false, true) => Some(Kleene::False),
            (false, false) => Some(Kleene::Unknown),
            (true, true) => None,
        }
    }
}

/// Rails for every atom of a table, by atom index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RailAssignment(pub Vec<Rail>);

impl RailAssignment {
    pub fn from_kleene(values: impl IntoIterator<Item = Kleene>) -> Self {
        RailAssignment(values.into_iter().map(Rail::from_kleene).collect())
    }

    pub fn uniform(n: usize, k: Kleene) -> Self {
        RailAssignment(vec![Rail::from_kleene(k); n])
    }

    pub fn rails(&self) -> &[Rail] {
        &self.0
    }

    /// Kleene value per atom; `None` if any rail pair is `(1,1)`.
    pub fn to_kleene(&self) -> Option<Vec<Kleene>> {
        self.0.iter().map(|r| r.kleene()).collect()
    }

    pub fn set(&mut self, atom: usize, k: Kleene) {
        self.0[atom] = Rail::from_kleene(k);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Maps an atom-indexed Kleene vector to an [`crate::interp::AtomEnv`].
pub struct TableEnv<'a> {
    pub table: &'a AtomTable,
    pub values: &'a [Kleene],
}

impl crate::interp::AtomEnv for TableEnv<'_> {
    fn atom(&self, atom: &Atom) -> Kleene {
        self.table
            .position(atom)
            .and_then(|i| self.values.get(i).copied())
            .unwrap_or(Kleene::Unknown)
    }
}

/// Decodes an output pair.
pub fn decode(grant: bool, deny: bool) -> Decision {
    Decision::from_bits(grant, deny)
}

use crate::circuit::{DualCircuit, Gate, Rail, RailAssignment};

use super::cnf::{CnfFormula, Lit};
use super::KnowledgeMode;

/// Variable numbering of an encoded circuit: atom `i` has rails
/// `2i+1` (true) and `2i+2` (false); gate `j` is `2n+j+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarMap {
    atoms: usize,
    gates: usize,
}

impl VarMap {
    pub fn true_rail(&self, atom: usize) -> Lit {
        (2 * atom + 1) as Lit
    }

    pub fn false_rail(&self, atom: usize) -> Lit {
        (2 * atom + 2) as Lit
    }

    pub fn gate(&self, gate: usize) -> Lit {
        (2 * self.atoms + gate + 1) as Lit
    }

    pub fn atom_count(&self) -> usize {
        self.atoms
    }

    pub fn gate_count(&self) -> usize {
        self.gates
    }

    /// Reads the rail assignment out of a model.
    pub fn rails(&self, model: &[bool]) -> RailAssignment {
        RailAssignment(
            (0..self.atoms)
                .map(|i| Rail {
                    t: model[self.true_rail(i) as usize],
                    f: model[self.false_rail(i) as usize],
                })
                .collect(),
        )
    }
}

/// Equisatisfiable CNF of the whole gate list. Output constraints are left
/// to the caller. Every atom gets the clause `¬t ∨ ¬f`; total mode adds
/// `t ∨ f`.
pub fn tseitin(c: &DualCircuit, mode: KnowledgeMode) -> (CnfFormula, VarMap) {
    let map = VarMap {
        atoms: c.table().len(),
        gates: c.gates().len(),
    };
    let mut f = CnfFormula::new(2 * map.atoms + map.gates);
    for i in 0..map.atoms {
        let (t, fr) = (map.true_rail(i), map.false_rail(i));
        f.add_clause([-t, -fr]);
        if mode == KnowledgeMode::Total {
            f.add_clause([t, fr]);
        }
    }
    for (j, gate) in c.gates().iter().enumerate() {
        let g = map.gate(j);
        match *gate {
            Gate::TrueRail(a) => equal(&mut f, g, map.true_rail(a)),
            Gate::FalseRail(a) => equal(&mut f, g, map.false_rail(a)),
            Gate::Const0 => f.add_clause([-g]),
            Gate::Const1 => f.add_clause([g]),
            Gate::And(l, r) => {
                let (a, b) = (map.gate(l), map.gate(r));
                f.add_clause([-g, a]);
                f.add_clause([-g, b]);
                f.add_clause([g, -a, -b]);
            }
            Gate::Or(l, r) => {
                let (a, b) = (map.gate(l), map.gate(r));
                f.add_clause([g, -a]);
                f.add_clause([g, -b]);
                f.add_clause([-g, a, b]);
            }
            Gate::Not(x) => equal(&mut f, g, -map.gate(x)),
        }
    }
    (f, map)
}

fn equal(f: &mut CnfFormula, a: Lit, b: Lit) {
    f.add_clause([-a, b]);
    f.add_clause([a, -b]);
}

/// Fresh variable `x ↔ a ⊕ b`.
pub(crate) fn xor_var(f: &mut CnfFormula, a: Lit, b: Lit) -> Lit {
    let x = f.fresh_var();
    f.add_clause([-x, a, b]);
    f.add_clause([-x, -a, -b]);
    f.add_clause([x, -a, b]);
    f.add_clause([x, a, -b]);
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{AtomTable, CircuitBuilder};
    use crate::parser::load;

    #[test]
    fn const1_output_is_a_unit_clause() {
        let c = DualCircuit::new(AtomTable::new(), vec![Gate::Const1], 0, 0).unwrap();
        let (f, map) = tseitin(&c, KnowledgeMode::Partial);
        assert_eq!(f.clauses(), &[vec![map.gate(0)]]);
    }

    #[test]
    fn and_gate_has_three_clauses() {
        let c = DualCircuit::new(
            AtomTable::new(),
            vec![Gate::Const1, Gate::Const0, Gate::And(0, 1)],
            2,
            2,
        )
        .unwrap();
        let (f, _) = tseitin(&c, KnowledgeMode::Partial);
        assert_eq!(&f.clauses()[2..], &[vec![-3, 1], vec![-3, 2], vec![3, -1, -2]]);
    }

    #[test]
    fn six_atom_policy_has_twelve_rail_variables() {
        let doc = load(crate::samples::DAUGHTER_DRIVE).unwrap();
        let c = crate::circuit::compile_policy(doc.get("daughter_drive").unwrap(), &doc).unwrap();
        let (f, map) = tseitin(&c, KnowledgeMode::Total);
        assert_eq!(map.atom_count(), 6);
        assert_eq!(f.variable_count() - c.gates().len(), 12);
        // 6 exclusion + 6 totality clauses come first.
        assert_eq!(f.clauses()[0], vec![-1, -2]);
        assert_eq!(f.clauses()[1], vec![1, 2]);
    }

    #[test]
    fn partial_mode_omits_totality() {
        let doc = load("policy X = grant if a == 1;").unwrap();
        let mut b = CircuitBuilder::new(&doc);
        b.add_atoms(doc.get("X").unwrap()).unwrap();
        let (g, d) = b.compile(doc.get("X").unwrap()).unwrap();
        let c = b.finish(g, d);
        let (partial, _) = tseitin(&c, KnowledgeMode::Partial);
        let (total, _) = tseitin(&c, KnowledgeMode::Total);
        assert_eq!(total.clauses().len(), partial.clauses().len() + 1);
    }
}

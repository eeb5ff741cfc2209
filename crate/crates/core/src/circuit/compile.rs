use std::collections::HashMap;

use crate::ast::{Condition, Guard, Policy, PolicyDocument};
use crate::decision::Decision;

use super::{AtomTable, CircuitError, DualCircuit, Gate};

/// The atoms reachable from `p`, including those inside guard sub-policies
/// and referenced definitions, in first-occurrence order.
pub fn collect_atoms(p: &Policy, doc: &PolicyDocument) -> Result<AtomTable, CircuitError> {
    let mut table = AtomTable::new();
    collect_atoms_into(&mut table, p, doc)?;
    Ok(table)
}

/// Adds the atoms of `p` to an existing table.
pub fn collect_atoms_into(
    table: &mut AtomTable,
    p: &Policy,
    doc: &PolicyDocument,
) -> Result<(), CircuitError> {
    walk(table, p, doc, 0)
}

fn walk(table: &mut AtomTable, p: &Policy, doc: &PolicyDocument, depth: usize) -> Result<(), CircuitError> {
    match p {
        Policy::RuleBlock(rules) => {
            for rule in rules {
                rule.condition.for_each_atom(&mut |a| {
                    table.intern(a);
                });
            }
        }
        Policy::Case(arms) => {
            for arm in arms {
                if let Guard::Conj(conj) = &arm.guard {
                    for (sub, _) in conj {
                        walk(table, sub, doc, depth)?;
                    }
                }
                walk(table, &arm.body, doc, depth)?;
            }
        }
        Policy::Ref(name) => walk(table, resolve(doc, name, depth)?, doc, depth + 1)?,
    }
    Ok(())
}

fn resolve<'d>(doc: &'d PolicyDocument, name: &str, depth: usize) -> Result<&'d Policy, CircuitError> {
    if depth > doc.definitions.len() {
        return Err(CircuitError::Cycle(name.to_string()));
    }
    doc.get(name)
        .ok_or_else(|| CircuitError::UnresolvedRef(name.to_string()))
}

/// Compiles `p` to a dual circuit whose atom table is `collect_atoms(p, doc)`.
pub fn compile_policy(p: &Policy, doc: &PolicyDocument) -> Result<DualCircuit, CircuitError> {
    let mut b = CircuitBuilder::new(doc);
    b.add_atoms(p)?;
    let (g, d) = b.compile(p)?;
    Ok(b.finish(g, d))
}

/// Incremental compiler. Several policies may be compiled into one gate list
/// over a shared atom table, which is how pairs of policies are compared.
pub struct CircuitBuilder<'d> {
    doc: &'d PolicyDocument,
    table: AtomTable,
    gates: Vec<Gate>,
    inputs: HashMap<usize, (usize, usize)>,
    const0: Option<usize>,
    const1: Option<usize>,
}

impl<'d> CircuitBuilder<'d> {
    pub fn new(doc: &'d PolicyDocument) -> Self {
        CircuitBuilder {
            doc,
            table: AtomTable::new(),
            gates: Vec::new(),
            inputs: HashMap::new(),
            const0: None,
            const1: None,
        }
    }

    /// Registers the atoms of `p`. Call for every policy before compiling any,
    /// so the table order is the first-occurrence order over all of them.
    pub fn add_atoms(&mut self, p: &Policy) -> Result<(), CircuitError> {
        collect_atoms_into(&mut self.table, p, self.doc)
    }

    pub fn table(&self) -> &AtomTable {
        &self.table
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.gates.len() - 1
    }

    pub fn zero(&mut self) -> usize {
        match self.const0 {
            Some(i) => i,
            None => {
                let i = self.push(Gate::Const0);
                self.const0 = Some(i);
                i
            }
        }
    }

    pub fn one(&mut self) -> usize {
        match self.const1 {
            Some(i) => i,
            None => {
                let i = self.push(Gate::Const1);
                self.const1 = Some(i);
                i
            }
        }
    }

    pub fn and(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::And(a, b))
    }

    pub fn or(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::Or(a, b))
    }

    pub fn not(&mut self, a: usize) -> usize {
        self.push(Gate::Not(a))
    }

    fn or_all(&mut self, wires: &[usize]) -> usize {
        match wires.split_first() {
            None => self.zero(),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &w| self.or(acc, w)),
        }
    }

    fn input(&mut self, atom: usize) -> (usize, usize) {
        if let Some(&rails) = self.inputs.get(&atom) {
            return rails;
        }
        let t = self.push(Gate::TrueRail(atom));
        let f = self.push(Gate::FalseRail(atom));
        self.inputs.insert(atom, (t, f));
        (t, f)
    }

    /// Rails `(t, f)` of a condition.
    fn condition(&mut self, c: &Condition) -> (usize, usize) {
        match c {
            Condition::Atom(a) => {
                let i = self.table.intern(a);
                self.input(i)
            }
            Condition::Taut => (self.one(), self.zero()),
            Condition::Contra => (self.zero(), self.one()),
            Condition::And(l, r) => {
                let (lt, lf) = self.condition(l);
                let (rt, rf) = self.condition(r);
                (self.and(lt, rt), self.or(lf, rf))
            }
            Condition::Or(l, r) => {
                let (lt, lf) = self.condition(l);
                let (rt, rf) = self.condition(r);
                (self.or(lt, rt), self.and(lf, rf))
            }
            Condition::Not(x) => {
                let (t, f) = self.condition(x);
                (f, t)
            }
        }
    }

    /// Output wires `(grant, deny)` of `p`. Referenced and guard
    /// sub-policies are inlined at each use.
    pub fn compile(&mut self, p: &Policy) -> Result<(usize, usize), CircuitError> {
        self.policy(p, 0)
    }

    fn policy(&mut self, p: &Policy, depth: usize) -> Result<(usize, usize), CircuitError> {
        match p {
            Policy::RuleBlock(rules) => {
                let mut grants = Vec::new();
                let mut denies = Vec::new();
                for rule in rules {
                    let (fires, _) = self.condition(&rule.condition);
                    match rule.effect.decision() {
                        Decision::Grant => grants.push(fires),
                        _ => denies.push(fires),
                    }
                }
                Ok((self.or_all(&grants), self.or_all(&denies)))
            }
            Policy::Ref(name) => {
                let target = resolve(self.doc, name, depth)?;
                self.policy(target, depth + 1)
            }
            Policy::Case(arms) => {
                let selected = self.selectors(arms, depth)?;
                let mut grants = Vec::with_capacity(arms.len());
                let mut denies = Vec::with_capacity(arms.len());
                for (arm, sel) in arms.iter().zip(selected) {
                    let (g, d) = self.policy(&arm.body, depth)?;
                    grants.push(self.and(sel, g));
                    denies.push(self.and(sel, d));
                }
                Ok((self.or_all(&grants), self.or_all(&denies)))
            }
        }
    }

    /// One wire per arm that is high iff that arm is the first whose guard holds.
    pub fn case_selectors(&mut self, arms: &[crate::ast::CaseArm]) -> Result<Vec<usize>, CircuitError> {
        self.selectors(arms, 0)
    }

    fn selectors(&mut self, arms: &[crate::ast::CaseArm], depth: usize) -> Result<Vec<usize>, CircuitError> {
        let mut out = Vec::with_capacity(arms.len());
        let mut earlier: Option<usize> = None;
        for arm in arms {
            let holds = match &arm.guard {
                Guard::True => self.one(),
                Guard::Conj(conj) => {
                    let mut acc: Option<usize> = None;
                    for (sub, expected) in conj {
                        let (g, d) = self.policy(sub, depth)?;
                        let test = self.exact(g, d, *expected);
                        acc = Some(match acc {
                            None => test,
                            Some(a) => self.and(a, test),
                        });
                    }
                    match acc {
                        Some(a) => a,
                        None => self.one(),
                    }
                }
            };
            let selected = match earlier {
                None => holds,
                Some(e) => {
                    let not_earlier = self.not(e);
                    self.and(holds, not_earlier)
                }
            };
            earlier = Some(match earlier {
                None => holds,
                Some(e) => self.or(e, holds),
            });
            out.push(selected);
        }
        Ok(out)
    }

    /// Wire that is high iff `(g, d)` encodes exactly `expected`.
    pub fn exact(&mut self, g: usize, d: usize, expected: Decision) -> usize {
        let (want_g, want_d) = expected.bits();
        let g = if want_g { g } else { self.not(g) };
        let d = if want_d { d } else { self.not(d) };
        self.and(g, d)
    }

    /// Snapshot with the given outputs; the builder can keep going.
    pub fn circuit(&mut self, grant_out: usize, deny_out: usize) -> DualCircuit {
        if self.gates.is_empty() {
            self.zero();
        }
        DualCircuit::new(self.table.clone(), self.gates.clone(), grant_out, deny_out)
            .expect("builder emits gates in topological order")
    }

    pub fn finish(mut self, grant_out: usize, deny_out: usize) -> DualCircuit {
        self.circuit(grant_out, deny_out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{eval_circuit, RailAssignment};
    use crate::decision::Kleene;
    use crate::parser::load;

    #[test]
    fn deduplicates_atoms() {
        let doc = load("policy X = grant if a == 1 || a == 1;").unwrap();
        let table = collect_atoms(doc.get("X").unwrap(), &doc).unwrap();
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn collects_through_references() {
        let doc = load(
            "policy P = grant if x == 1; policy Q = deny if y == 1;\n\
             policy PQ = case { [P eval conflict : deny] [P eval undef : Q] [true : P] };",
        )
        .unwrap();
        let table = collect_atoms(doc.get("PQ").unwrap(), &doc).unwrap();
        let names: Vec<_> = table.atoms().iter().map(|a| a.canonical()).collect();
        assert_eq!(names, ["x == 1", "y == 1"]);
    }

    #[test]
    fn conflict_literal_is_constant() {
        let doc = load("policy C = conflict;").unwrap();
        let c = compile_policy(doc.get("C").unwrap(), &doc).unwrap();
        assert!(c.table().is_empty());
        let d = eval_circuit(&c, &RailAssignment::default()).unwrap();
        assert_eq!(d, Decision::Conflict);
    }

    #[test]
    fn unknown_blocks_firing() {
        let doc = load("policy X = grant if a == 1 && b == 1;").unwrap();
        let c = compile_policy(doc.get("X").unwrap(), &doc).unwrap();
        let ra = RailAssignment::from_kleene([Kleene::True, Kleene::Unknown]);
        assert_eq!(eval_circuit(&c, &ra).unwrap(), Decision::Undef);
    }

    #[test]
    fn compile_is_deterministic() {
        let doc = load(
            "policy P = grant if a == 1; deny if !(b == 2 || c == 3);\n\
             policy R = case { [P eval grant && P eval grant : deny] [true : P] };",
        )
        .unwrap();
        let p = doc.get("R").unwrap();
        assert_eq!(compile_policy(p, &doc).unwrap(), compile_policy(p, &doc).unwrap());
    }

    #[test]
    fn unresolved_reference_is_an_error() {
        let doc = crate::parser::parse("policy A = B;").unwrap();
        assert_eq!(
            compile_policy(doc.get("A").unwrap(), &doc),
            Err(CircuitError::UnresolvedRef("B".into()))
        );
    }
}

use crate::decision::Decision;

use super::{CircuitError, DualCircuit, Gate, RailAssignment};

/// Reusable wire buffer. One evaluator per thread; evaluation does not
/// allocate once the buffer has grown to the circuit's size.
#[derive(Debug, Default, Clone)]
pub struct Evaluator {
    wires: Vec<bool>,
}

impl Evaluator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(gates: usize) -> Self {
        Evaluator {
            wires: Vec::with_capacity(gates),
        }
    }

    /// Single topological pass over the gates.
    pub fn run(&mut self, c: &DualCircuit, ra: &RailAssignment) -> Result<Decision, CircuitError> {
        let atoms = c.table().len();
        if ra.len() < atoms {
            return Err(CircuitError::MissingAtoms {
                expected: atoms,
                got: ra.len(),
            });
        }
        if let Some(i) = ra.rails()[..atoms].iter().position(|r| r.t && r.f) {
            return Err(CircuitError::RailConflict(i));
        }
        let rails = ra.rails();
        self.wires.clear();
        self.wires.resize(c.gates().len(), false);
        for (i, gate) in c.gates().iter().enumerate() {
            let w = &self.wires;
            self.wires[i] = match *gate {
                Gate::TrueRail(a) => rails[a].t,
                Gate::FalseRail(a) => rails[a].f,
                Gate::Const0 => false,
                Gate::Const1 => true,
                Gate::And(l, r) => w[l] & w[r],
                Gate::Or(l, r) => w[l] | w[r],
                Gate::Not(x) => !w[x],
            };
        }
        Ok(Decision::from_bits(
            self.wires[c.grant_out()],
            self.wires[c.deny_out()],
        ))
    }

    /// Value of a wire from the last [`Evaluator::run`].
    pub fn wire(&self, gate: usize) -> bool {
        self.wires[gate]
    }
}

/// Evaluates with a fresh buffer.
pub fn eval_circuit(c: &DualCircuit, ra: &RailAssignment) -> Result<Decision, CircuitError> {
    Evaluator::with_capacity(c.gates().len()).run(c, ra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{compile_policy, Rail};
    use crate::decision::Kleene;
    use crate::parser::load;

    #[test]
    fn rejects_both_rails_high() {
        let doc = load("policy X = grant if a == 1;").unwrap();
        let c = compile_policy(doc.get("X").unwrap(), &doc).unwrap();
        let ra = RailAssignment(vec![Rail { t: true, f: true }]);
        assert_eq!(eval_circuit(&c, &ra), Err(CircuitError::RailConflict(0)));
    }

    #[test]
    fn rejects_short_assignment() {
        let doc = load("policy X = grant if a == 1 && b == 2;").unwrap();
        let c = compile_policy(doc.get("X").unwrap(), &doc).unwrap();
        let ra = RailAssignment::from_kleene([Kleene::True]);
        assert!(matches!(eval_circuit(&c, &ra), Err(CircuitError::MissingAtoms { expected: 2, got: 1 })));
    }

    #[test]
    fn buffer_is_reused() {
        let doc = load("policy X = grant if a == 1; deny if b == 1;").unwrap();
        let c = compile_policy(doc.get("X").unwrap(), &doc).unwrap();
        let mut ev = Evaluator::new();
        let both = RailAssignment::uniform(2, Kleene::True);
        assert_eq!(ev.run(&c, &both).unwrap(), Decision::Conflict);
        let cap = ev.wires.capacity();
        let none = RailAssignment::uniform(2, Kleene::False);
        assert_eq!(ev.run(&c, &none).unwrap(), Decision::Undef);
        assert_eq!(ev.wires.capacity(), cap);
    }
}

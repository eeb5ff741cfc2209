//! Reference interpreter: the meaning of every policy.

use std::collections::HashMap;

use crate::ast::{Atom, AttrPath, CaseArm, Condition, Guard, Operand, Policy, PolicyDocument, Value};
use crate::decision::{Decision, Kleene};

/// Source of attribute values. `None` means the attribute is unknown.
pub trait Attributes {
    fn resolve(&self, path: &AttrPath) -> Option<Value>;
}

/// Truth value of each atomic condition.
///
/// The interpreter is parameterised over atoms rather than attributes so that
/// analyses can assign atoms independently of any attribute model.
pub trait AtomEnv {
    fn atom(&self, atom: &Atom) -> Kleene;
}

impl<F: Fn(&Atom) -> Kleene> AtomEnv for F {
    fn atom(&self, atom: &Atom) -> Kleene {
        self(atom)
    }
}

/// Plain map from paths to values; missing paths are unknown.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttributeAssignment {
    values: HashMap<AttrPath, Value>,
}

impl AttributeAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, path: AttrPath, value: impl Into<Value>) -> &mut Self {
        self.values.insert(path, value.into());
        self
    }

    /// Builder form taking a dotted path. Panics on an invalid path.
    pub fn with(mut self, dotted: &str, value: impl Into<Value>) -> Self {
        let path = AttrPath::parse(dotted).expect("valid attribute path");
        self.values.insert(path, value.into());
        self
    }

    pub fn remove(&mut self, dotted: &str) -> Option<Value> {
        self.values.remove(&AttrPath::parse(dotted).ok()?)
    }
}

impl Attributes for AttributeAssignment {
    fn resolve(&self, path: &AttrPath) -> Option<Value> {
        self.values.get(path).cloned()
    }
}

impl AtomEnv for AttributeAssignment {
    fn atom(&self, atom: &Atom) -> Kleene {
        eval_atom(atom, self)
    }
}

/// Adapts any [`Attributes`] source into an [`AtomEnv`].
pub struct Resolved<'a, A: ?Sized>(pub &'a A);

impl<A: Attributes + ?Sized> AtomEnv for Resolved<'_, A> {
    fn atom(&self, atom: &Atom) -> Kleene {
        eval_atom(atom, self.0)
    }
}

/// Unresolved operands and cross-variant comparisons are unknown; ordering
/// on strings and booleans is unknown too.
pub fn eval_atom(atom: &Atom, attrs: &(impl Attributes + ?Sized)) -> Kleene {
    let Some(lhs) = attrs.resolve(&atom.lhs) else {
        return Kleene::Unknown;
    };
    let rhs = match &atom.rhs {
        Operand::Literal(v) => v.clone(),
        Operand::Path(p) => match attrs.resolve(p) {
            Some(v) => v,
            None => return Kleene::Unknown,
        },
    };
    compare_values(&lhs, atom.op, &rhs)
}

pub(crate) fn compare_values(lhs: &Value, op: crate::ast::CmpOp, rhs: &Value) -> Kleene {
    if op.is_ordering() && !(lhs.is_orderable() && rhs.is_orderable()) {
        return Kleene::Unknown;
    }
    match lhs.compare(rhs) {
        Some(ord) => op.holds(ord).into(),
        None => Kleene::Unknown,
    }
}

pub fn eval_condition(c: &Condition, env: &(impl AtomEnv + ?Sized)) -> Kleene {
    match c {
        Condition::Atom(a) => env.atom(a),
        Condition::And(l, r) => eval_condition(l, env).and(eval_condition(r, env)),
        Condition::Or(l, r) => eval_condition(l, env).or(eval_condition(r, env)),
        Condition::Not(c) => eval_condition(c, env).not(),
        Condition::Taut => Kleene::True,
        Condition::Contra => Kleene::False,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unresolved policy reference `{0}`")]
    UnresolvedRef(String),
    #[error("reference cycle through `{0}`")]
    Cycle(String),
}

/// Evaluates `p` in the context of `doc`.
pub fn eval_policy(
    p: &Policy,
    doc: &PolicyDocument,
    env: &(impl AtomEnv + ?Sized),
) -> Result<Decision, EvalError> {
    Interpreter { doc, env }.policy(p, 0)
}

/// Index of the case arm that decides, or `None` when no guard holds.
pub fn selected_arm(
    arms: &[CaseArm],
    doc: &PolicyDocument,
    env: &(impl AtomEnv + ?Sized),
) -> Result<Option<usize>, EvalError> {
    Interpreter { doc, env }.select(arms, 0)
}

struct Interpreter<'a, E: ?Sized> {
    doc: &'a PolicyDocument,
    env: &'a E,
}

impl<E: AtomEnv + ?Sized> Interpreter<'_, E> {
    fn policy(&self, p: &Policy, depth: usize) -> Result<Decision, EvalError> {
        match p {
            Policy::RuleBlock(rules) => Ok(rules
                .iter()
                .filter(|r| eval_condition(&r.condition, self.env).is_true())
                .fold(Decision::Undef, |acc, r| acc.join(r.effect.decision()))),
            Policy::Case(arms) => match self.select(arms, depth)? {
                Some(k) => self.policy(&arms[k].body, depth),
                None => Ok(Decision::Undef),
            },
            Policy::Ref(name) => {
                if depth > self.doc.definitions.len() {
                    return Err(EvalError::Cycle(name.clone()));
                }
                let target = self
                    .doc
                    .get(name)
                    .ok_or_else(|| EvalError::UnresolvedRef(name.clone()))?;
                self.policy(target, depth + 1)
            }
        }
    }

    fn select(&self, arms: &[CaseArm], depth: usize) -> Result<Option<usize>, EvalError> {
        for (k, arm) in arms.iter().enumerate() {
            let holds = match &arm.guard {
                Guard::True => true,
                Guard::Conj(conj) => {
                    let mut all = true;
                    for (sub, expected) in conj {
                        if self.policy(sub, depth)? != *expected {
                            all = false;
                            break;
                        }
                    }
                    all
                }
            };
            if holds {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

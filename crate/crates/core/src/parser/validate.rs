use std::collections::HashMap;
use std::fmt;

use crate::ast::{CaseArm, Condition, Guard, Operand, Policy, PolicyDocument, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemanticErrorKind {
    DuplicateName(String),
    UnresolvedRef { from: String, target: String },
    /// Definitions on the cycle, in reference order.
    Cycle(Vec<String>),
    OrderingOnUnorderable { atom: String, kind: &'static str },
    EmptyRuleBlock,
    EmptyCase,
    EmptyGuard,
    /// A reserved constant atom outside a canonical decision literal.
    ReservedConstant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticError {
    /// Span of the definition the error was found in.
    pub span: Span,
    pub policy: String,
    pub kind: SemanticErrorKind,
}

impl fmt::Display for SemanticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: in policy `{}`: ", self.span, self.policy)?;
        match &self.kind {
            SemanticErrorKind::DuplicateName(n) => write!(f, "policy `{n}` is defined more than once"),
            SemanticErrorKind::UnresolvedRef { target, .. } => {
                write!(f, "reference to undefined policy `{target}`")
            }
            SemanticErrorKind::Cycle(names) => {
                write!(f, "reference cycle {} -> {}", names.join(" -> "), names[0])
            }
            SemanticErrorKind::OrderingOnUnorderable { atom, kind } => {
                write!(f, "ordering comparison on {kind} literal in `{atom}`")
            }
            SemanticErrorKind::EmptyRuleBlock => f.write_str("rule block has no rules"),
            SemanticErrorKind::EmptyCase => f.write_str("case statement has no arms"),
            SemanticErrorKind::EmptyGuard => f.write_str("guard conjunction is empty"),
            SemanticErrorKind::ReservedConstant => {
                f.write_str("reserved constant atom outside a decision literal")
            }
        }
    }
}

impl std::error::Error for SemanticError {}

/// Checks names, references, acyclicity and literal typing. Reports every
/// violation found, in definition order.
pub fn validate_document(doc: &PolicyDocument) -> Result<(), Vec<SemanticError>> {
    let mut errors = Vec::new();
    let mut first: HashMap<&str, usize> = HashMap::new();
    for (i, def) in doc.definitions.iter().enumerate() {
        if first.contains_key(def.name.as_str()) {
            errors.push(SemanticError {
                span: def.span,
                policy: def.name.clone(),
                kind: SemanticErrorKind::DuplicateName(def.name.clone()),
            });
        } else {
            first.insert(def.name.as_str(), i);
        }
    }

    for def in &doc.definitions {
        let mut push = |kind| {
            errors.push(SemanticError {
                span: def.span,
                policy: def.name.clone(),
                kind,
            })
        };
        for target in def.policy.references() {
            if !first.contains_key(target) {
                push(SemanticErrorKind::UnresolvedRef {
                    from: def.name.clone(),
                    target: target.to_string(),
                });
            }
        }
        check_policy(&def.policy, &mut push);
    }

    errors.extend(find_cycles(doc, &first));
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn check_policy(p: &Policy, push: &mut impl FnMut(SemanticErrorKind)) {
    match p {
        Policy::Ref(_) => {}
        Policy::RuleBlock(rules) => {
            if rules.is_empty() {
                push(SemanticErrorKind::EmptyRuleBlock);
            }
            if p.as_literal().is_none() && rules.iter().any(|r| has_constant(&r.condition)) {
                push(SemanticErrorKind::ReservedConstant);
            }
            for rule in rules {
                rule.condition.for_each_atom(&mut |atom| {
                    if let Operand::Literal(v) = &atom.rhs {
                        if atom.op.is_ordering() && !v.is_orderable() {
                            push(SemanticErrorKind::OrderingOnUnorderable {
                                atom: atom.canonical(),
                                kind: v.kind(),
                            });
                        }
                    }
                });
            }
        }
        Policy::Case(arms) => {
            if arms.is_empty() {
                push(SemanticErrorKind::EmptyCase);
            }
            for CaseArm { guard, body } in arms {
                if let Guard::Conj(conj) = guard {
                    if conj.is_empty() {
                        push(SemanticErrorKind::EmptyGuard);
                    }
                    for (sub, _) in conj {
                        check_policy(sub, push);
                    }
                }
                check_policy(body, push);
            }
        }
    }
}

fn has_constant(c: &Condition) -> bool {
    match c {
        Condition::Taut | Condition::Contra => true,
        Condition::Atom(_) => false,
        Condition::And(l, r) | Condition::Or(l, r) => has_constant(l) || has_constant(r),
        Condition::Not(c) => has_constant(c),
    }
}

fn find_cycles(doc: &PolicyDocument, index: &HashMap<&str, usize>) -> Vec<SemanticError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }

    fn visit(
        node: usize,
        doc: &PolicyDocument,
        index: &HashMap<&str, usize>,
        marks: &mut [Mark],
        stack: &mut Vec<usize>,
        out: &mut Vec<SemanticError>,
    ) {
        marks[node] = Mark::Active;
        stack.push(node);
        for target in doc.definitions[node].policy.references() {
            let Some(&next) = index.get(target) else {
                continue;
            };
            match marks[next] {
                Mark::New => visit(next, doc, index, marks, stack, out),
                Mark::Active => {
                    let at = stack.iter().position(|&n| n == next).unwrap_or(0);
                    let names = stack[at..]
                        .iter()
                        .map(|&n| doc.definitions[n].name.clone())
                        .collect();
                    let def = &doc.definitions[next];
                    out.push(SemanticError {
                        span: def.span,
                        policy: def.name.clone(),
                        kind: SemanticErrorKind::Cycle(names),
                    });
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        marks[node] = Mark::Done;
    }

    let mut marks = vec![Mark::New; doc.definitions.len()];
    let mut out = Vec::new();
    for (i, def) in doc.definitions.iter().enumerate() {
        // Only first definitions take part in reference resolution.
        if index.get(def.name.as_str()) == Some(&i) && marks[i] == Mark::New {
            visit(i, doc, index, &mut marks, &mut Vec::new(), &mut out);
        }
    }
    out
}

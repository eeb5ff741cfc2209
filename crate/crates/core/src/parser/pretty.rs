use std::fmt::Write;

use crate::ast::{Condition, Guard, Policy, PolicyDocument, Rule};

/// Renders a document in canonical surface syntax. Deterministic; parsing
/// the output yields a structurally equal document.
pub fn pretty_print(doc: &PolicyDocument) -> String {
    let mut out = String::new();
    for def in &doc.definitions {
        out.push_str("policy ");
        out.push_str(&def.name);
        out.push_str(" =");
        match &def.policy {
            Policy::Case(_) => out.push(' '),
            _ => out.push_str("\n    "),
        }
        write_policy(&mut out, &def.policy, 0);
        out.push_str(";\n");
    }
    out
}

/// Renders a single policy.
pub fn print_policy(p: &Policy) -> String {
    let mut out = String::new();
    write_policy(&mut out, p, 0);
    out
}

/// Renders a condition; `&&` and `||` are left-associative and `&&` binds
/// tighter, so parentheses appear only where the tree needs them.
pub fn print_condition(c: &Condition) -> String {
    let mut out = String::new();
    write_condition(&mut out, c, Prec::Or);
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn write_policy(out: &mut String, p: &Policy, level: usize) {
    if let Some(d) = p.as_literal() {
        out.push_str(d.as_str());
        return;
    }
    match p {
        Policy::Ref(name) => out.push_str(name),
        Policy::RuleBlock(rules) => {
            for (i, rule) in rules.iter().enumerate() {
                if i > 0 {
                    out.push_str("; ");
                }
                write_rule(out, rule);
            }
        }
        Policy::Case(arms) => {
            out.push_str("case {\n");
            for arm in arms {
                indent(out, level + 1);
                out.push('[');
                match &arm.guard {
                    Guard::True => out.push_str("true"),
                    Guard::Conj(conj) => {
                        for (i, (sub, d)) in conj.iter().enumerate() {
                            if i > 0 {
                                out.push_str(" && ");
                            }
                            write_policy(out, sub, level + 1);
                            let _ = write!(out, " eval {d}");
                        }
                    }
                }
                out.push_str(" : ");
                write_policy(out, &arm.body, level + 1);
                out.push_str("]\n");
            }
            indent(out, level);
            out.push('}');
        }
    }
}

fn write_rule(out: &mut String, rule: &Rule) {
    out.push_str(rule.effect.as_str());
    out.push_str(" if ");
    write_condition(out, &rule.condition, Prec::Or);
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Or,
    And,
    Unary,
}

fn write_condition(out: &mut String, c: &Condition, ctx: Prec) {
    match c {
        Condition::Atom(a) => {
            let _ = write!(out, "({a})");
        }
        Condition::Taut => out.push_str("TAUT"),
        Condition::Contra => out.push_str("CONTRA"),
        Condition::Not(inner) => {
            out.push('!');
            write_condition(out, inner, Prec::Unary);
        }
        Condition::And(l, r) => binary(out, l, r, "&&", Prec::And, ctx),
        Condition::Or(l, r) => binary(out, l, r, "||", Prec::Or, ctx),
    }
}

fn binary(out: &mut String, l: &Condition, r: &Condition, op: &str, own: Prec, ctx: Prec) {
    let parens = ctx > own;
    if parens {
        out.push('(');
    }
    write_condition(out, l, own);
    let _ = write!(out, " {op} ");
    // Right operands of the same precedence need grouping to stay right-nested.
    let right_ctx = if own == Prec::Or { Prec::And } else { Prec::Unary };
    write_condition(out, r, right_ctx);
    if parens {
        out.push(')');
    }
}

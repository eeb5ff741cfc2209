//! Random policy generation and brute-force oracles shared by the
//! integration tests. The oracles only use the reference interpreter.

#![allow(dead_code)]

use frost::ast::{
    Atom, AttrPath, CaseArm, CmpOp, Condition, Decimal, Guard, Policy, PolicyDocument, Rule, TimeOfDay,
    Value,
};
use frost::decision::{Decision, Kleene};
use frost::interp::{eval_policy, selected_arm};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const OPS: [CmpOp; 6] = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];

fn random_value(rng: &mut StdRng) -> Value {
    match rng.random_range(0..5) {
        0 => Value::Int(rng.random_range(-50..5000)),
        1 => Value::Decimal(Decimal::new(rng.random_range(-400..400) as f64 / 8.0).unwrap()),
        2 => {
            let words = ["valid", "vehicle", "a b", "quote\"d", "back\\slash", "", "ünï"];
            Value::Str(words[rng.random_range(0..words.len())].to_string())
        }
        3 => Value::Bool(rng.random_bool(0.5)),
        _ => Value::Time(TimeOfDay::from_hm(rng.random_range(0..24), rng.random_range(0..60)).unwrap()),
    }
}

fn random_path(rng: &mut StdRng) -> AttrPath {
    let roots = ["subject", "object", "action", "localTime", "vehicle", "x", "y"];
    let mut segs = vec![roots[rng.random_range(0..roots.len())].to_string()];
    for _ in 0..rng.random_range(0..3) {
        segs.push(["owner", "daughter", "speed", "p1"][rng.random_range(0..4)].to_string());
    }
    AttrPath::new(segs).unwrap()
}

/// A varied atom that validates: ordering only on orderable literals.
pub fn random_atom(rng: &mut StdRng) -> Atom {
    let lhs = random_path(rng);
    if rng.random_bool(0.15) {
        return Atom::new(lhs, OPS[rng.random_range(0..6)], random_path(rng));
    }
    let v = random_value(rng);
    let op = if v.is_orderable() {
        OPS[rng.random_range(0..6)]
    } else {
        [CmpOp::Eq, CmpOp::Ne][rng.random_range(0..2)]
    };
    Atom::new(lhs, op, v)
}

/// `n` pairwise distinct atoms.
pub fn atom_pool(rng: &mut StdRng, n: usize) -> Vec<Atom> {
    let mut pool: Vec<Atom> = Vec::with_capacity(n);
    while pool.len() < n {
        let a = random_atom(rng);
        if !pool.contains(&a) {
            pool.push(a);
        }
    }
    pool
}

pub fn random_condition(rng: &mut StdRng, pool: &[Atom], depth: usize) -> Condition {
    if depth == 0 || rng.random_bool(0.35) {
        return Condition::Atom(pool[rng.random_range(0..pool.len())].clone());
    }
    match rng.random_range(0..3) {
        0 => Condition::and(random_condition(rng, pool, depth - 1), random_condition(rng, pool, depth - 1)),
        1 => Condition::or(random_condition(rng, pool, depth - 1), random_condition(rng, pool, depth - 1)),
        _ => Condition::negate(random_condition(rng, pool, depth - 1)),
    }
}

pub fn random_rule_block(rng: &mut StdRng, pool: &[Atom]) -> Policy {
    let rules = (0..rng.random_range(1..=3))
        .map(|_| {
            let c = random_condition(rng, pool, 3);
            if rng.random_bool(0.5) {
                Rule::grant(c)
            } else {
                Rule::deny(c)
            }
        })
        .collect();
    Policy::RuleBlock(rules)
}

fn random_decision(rng: &mut StdRng) -> Decision {
    Decision::ALL[rng.random_range(0..4)]
}

/// A policy whose references point at `names`.
pub fn random_policy(rng: &mut StdRng, pool: &[Atom], names: &[String], depth: usize) -> Policy {
    let choice = if depth == 0 { rng.random_range(0..3) } else { rng.random_range(0..5) };
    match choice {
        0 => random_rule_block(rng, pool),
        1 if !names.is_empty() => Policy::reference(&names[rng.random_range(0..names.len())]),
        1 | 2 => Policy::literal(random_decision(rng)),
        _ => {
            let arms = (0..rng.random_range(1..=3))
                .map(|_| {
                    let guard = if rng.random_bool(0.25) {
                        Guard::True
                    } else {
                        Guard::Conj(
                            (0..rng.random_range(1..=2))
                                .map(|_| (random_policy(rng, pool, names, 0), random_decision(rng)))
                                .collect(),
                        )
                    };
                    CaseArm {
                        guard,
                        body: random_policy(rng, pool, names, depth - 1),
                    }
                })
                .collect();
            Policy::Case(arms)
        }
    }
}

/// Document whose last definition, `top`, may reference earlier ones.
pub fn random_document(rng: &mut StdRng, pool: &[Atom]) -> PolicyDocument {
    let mut doc = PolicyDocument::new();
    let mut names = Vec::new();
    for i in 0..rng.random_range(0..=3) {
        let name = format!("p{i}");
        let p = random_policy(rng, pool, &names, 1);
        doc.define(&name, p);
        names.push(name);
    }
    let top = random_policy(rng, pool, &names, 2);
    doc.define("top", top);
    doc
}

/// Every Kleene vector of length `n` (`3^n` of them), or only the total ones.
pub fn assignments(n: usize, total: bool) -> Vec<Vec<Kleene>> {
    let vals: &[Kleene] = if total {
        &[Kleene::True, Kleene::False]
    } else {
        &Kleene::ALL
    };
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |k| {
                    let mut v = prefix.clone();
                    v.push(*k);
                    v
                })
            })
            .collect();
    }
    out
}

/// Atom environment over an explicit atom list.
pub fn env<'a>(atoms: &'a [Atom], values: &'a [Kleene]) -> impl Fn(&Atom) -> Kleene + 'a {
    move |a: &Atom| {
        atoms
            .iter()
            .position(|x| x == a)
            .map(|i| values[i])
            .unwrap_or(Kleene::Unknown)
    }
}

/// Distinct atoms of a policy with references inlined, in first-occurrence order.
pub fn atoms_of(p: &Policy, doc: &PolicyDocument, out: &mut Vec<Atom>) {
    fn walk(p: &Policy, out: &mut Vec<Atom>) {
        match p {
            Policy::RuleBlock(rules) => {
                for r in rules {
                    r.condition.for_each_atom(&mut |a| {
                        if !out.contains(a) {
                            out.push(a.clone());
                        }
                    });
                }
            }
            Policy::Case(arms) => {
                for arm in arms {
                    if let Guard::Conj(tests) = &arm.guard {
                        for (q, _) in tests {
                            walk(q, out);
                        }
                    }
                    walk(&arm.body, out);
                }
            }
            Policy::Ref(_) => unreachable!("expanded"),
        }
    }
    walk(&doc.expand(p).expect("resolvable"), out);
}

pub fn interp(p: &Policy, doc: &PolicyDocument, atoms: &[Atom], values: &[Kleene]) -> Decision {
    eval_policy(p, doc, &env(atoms, values)).expect("validated")
}

pub fn interp_arm(arms: &[CaseArm], doc: &PolicyDocument, atoms: &[Atom], values: &[Kleene]) -> Option<usize> {
    selected_arm(arms, doc, &env(atoms, values)).expect("validated")
}

/// Brute force: can `p` decide `d`?
pub fn oracle_reachable(p: &Policy, doc: &PolicyDocument, atoms: &[Atom], d: Decision, total: bool) -> bool {
    assignments(atoms.len(), total)
        .iter()
        .any(|v| interp(p, doc, atoms, v) == d)
}

/// A case statement over `names` and `pool`.
pub fn random_case(rng: &mut StdRng, pool: &[Atom], names: &[String]) -> Policy {
    loop {
        if let p @ Policy::Case(_) = random_policy(rng, pool, names, 2) {
            return p;
        }
    }
}

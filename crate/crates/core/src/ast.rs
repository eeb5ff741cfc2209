//! Abstract syntax of FROST policies.

use std::cmp::Ordering;
use std::fmt;

use crate::decision::Decision;

/// Source location: 1-based line and column, byte offset and length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub len: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A dotted attribute path such as `vehicle.owner.daughter`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttrPath(Vec<String>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("attribute path is empty")]
    Empty,
    #[error("invalid path segment `{0}`")]
    BadSegment(String),
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl AttrPath {
    pub fn new<I, S>(segments: I) -> Result<Self, PathError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() {
            return Err(PathError::Empty);
        }
        if let Some(bad) = segments.iter().find(|s| !is_identifier(s)) {
            return Err(PathError::BadSegment(bad.clone()));
        }
        Ok(AttrPath(segments))
    }

    /// Parses `a.b.c`.
    pub fn parse(dotted: &str) -> Result<Self, PathError> {
        AttrPath::new(dotted.split('.'))
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }

    pub fn root(&self) -> &str {
        &self.0[0]
    }

    /// True if `prefix` is a segment-wise prefix of this path.
    pub fn starts_with(&self, prefix: &AttrPath) -> bool {
        self.0.len() >= prefix.0.len() && self.0[..prefix.0.len()] == prefix.0[..]
    }
}

impl fmt::Display for AttrPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

/// A finite, non-NaN decimal number.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Decimal(f64);

impl Decimal {
    pub fn new(v: f64) -> Option<Self> {
        v.is_finite().then_some(Decimal(v))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // f64's Display never uses exponent notation, so only the point may be missing.
        let s = self.0.to_string();
        if s.contains('.') {
            f.write_str(&s)
        } else {
            write!(f, "{s}.0")
        }
    }
}

/// Minutes since midnight, `0..=1439`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeOfDay(u16);

impl TimeOfDay {
    pub fn new(minutes: u16) -> Option<Self> {
        (minutes < 24 * 60).then_some(TimeOfDay(minutes))
    }

    pub fn from_hm(hours: u16, minutes: u16) -> Option<Self> {
        (hours < 24 && minutes < 60).then(|| TimeOfDay(hours * 60 + minutes))
    }

    /// Parses the four-digit `HHMM` form.
    pub fn parse_hhmm(s: &str) -> Option<Self> {
        if s.len() != 4 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let hours: u16 = s[..2].parse().ok()?;
        let minutes: u16 = s[2..].parse().ok()?;
        TimeOfDay::from_hm(hours, minutes)
    }

    pub fn minutes(self) -> u16 {
        self.0
    }
}

impl fmt::Display for TimeOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}{:02}", self.0 / 60, self.0 % 60)
    }
}

/// An attribute value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Decimal(Decimal),
    Str(String),
    Bool(bool),
    Time(TimeOfDay),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Decimal(_) => "decimal",
            Value::Str(_) => "string",
            Value::Bool(_) => "boolean",
            Value::Time(_) => "time",
        }
    }

    pub fn is_orderable(&self) -> bool {
        matches!(self, Value::Int(_) | Value::Decimal(_) | Value::Time(_))
    }

    /// Compares two values of the same variant. Values of different
    /// variants are incomparable.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            (Value::Decimal(a), Value::Decimal(b)) => a.partial_cmp(b),
            (Value::Str(a), Value::Str(b)) => Some(a.cmp(b)),
            (Value::Bool(a), Value::Bool(b)) => Some(a.cmp(b)),
            (Value::Time(a), Value::Time(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<TimeOfDay> for Value {
    fn from(v: TimeOfDay) -> Self {
        Value::Time(v)
    }
}

/// Writes a string literal with `\"`, `\\`, `\n`, `\t` escapes.
pub(crate) fn write_string_literal(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

/// Canonical literal rendering. Four-digit unsigned numbers are time
/// literals in the surface syntax, so integers in `1000..=9999` carry an
/// explicit `+` sign.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) if (1000..=9999).contains(v) => write!(f, "+{v}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Decimal(v) => write!(f, "{v}"),
            Value::Str(s) => write_string_literal(f, s),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Time(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    /// The operator with its operands swapped: `a < b` iff `b > a`.
    pub fn flipped(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            op => op,
        }
    }

    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Path(AttrPath),
    Literal(Value),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Path(p) => write!(f, "{p}"),
            Operand::Literal(v) => write!(f, "{v}"),
        }
    }
}

/// A relational atom `lhs op rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub lhs: AttrPath,
    pub op: CmpOp,
    pub rhs: Operand,
}

impl Atom {
    pub fn new(lhs: AttrPath, op: CmpOp, rhs: impl Into<Operand>) -> Self {
        Atom {
            lhs,
            op,
            rhs: rhs.into(),
        }
    }

    /// Canonical text; syntactically equal atoms render identically.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl From<Value> for Operand {
    fn from(v: Value) -> Self {
        Operand::Literal(v)
    }
}

impl From<AttrPath> for Operand {
    fn from(p: AttrPath) -> Self {
        Operand::Path(p)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op, self.rhs)
    }
}

/// Condition trees. `Taut` and `Contra` are the reserved constant atoms
/// that decision literals desugar to; they have no surface syntax.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Atom(Atom),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
    Not(Box<Condition>),
    Taut,
    Contra,
}

impl Condition {
    pub fn and(a: Condition, b: Condition) -> Condition {
        Condition::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Condition, b: Condition) -> Condition {
        Condition::Or(Box::new(a), Box::new(b))
    }

    pub fn negate(c: Condition) -> Condition {
        Condition::Not(Box::new(c))
    }

    /// Visits atoms left to right.
    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Condition::Atom(a) => f(a),
            Condition::And(l, r) | Condition::Or(l, r) => {
                l.for_each_atom(f);
                r.for_each_atom(f);
            }
            Condition::Not(c) => c.for_each_atom(f),
            Condition::Taut | Condition::Contra => {}
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Condition::And(l, r) | Condition::Or(l, r) => 1 + l.node_count() + r.node_count(),
            Condition::Not(c) => 1 + c.node_count(),
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Effect {
    Grant,
    Deny,
}

impl Effect {
    pub fn decision(self) -> Decision {
        match self {
            Effect::Grant => Decision::Grant,
            Effect::Deny => Decision::Deny,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Effect::Grant => "grant",
            Effect::Deny => "deny",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub effect: Effect,
    pub condition: Condition,
}

impl Rule {
    pub fn grant(condition: Condition) -> Self {
        Rule {
            effect: Effect::Grant,
            condition,
        }
    }

    pub fn deny(condition: Condition) -> Self {
        Rule {
            effect: Effect::Deny,
            condition,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Guard {
    True,
    /// Holds iff every sub-policy evaluates to exactly its expected decision.
    Conj(Vec<(Policy, Decision)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseArm {
    pub guard: Guard,
    pub body: Policy,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    RuleBlock(Vec<Rule>),
    Case(Vec<CaseArm>),
    Ref(String),
}

impl Policy {
    /// Canonical desugaring of a decision literal.
    pub fn literal(d: Decision) -> Policy {
        match d {
            Decision::Grant => Policy::RuleBlock(vec![Rule::grant(Condition::Taut)]),
            Decision::Deny => Policy::RuleBlock(vec![Rule::deny(Condition::Taut)]),
            Decision::Undef => Policy::RuleBlock(vec![Rule::grant(Condition::Contra)]),
            Decision::Conflict => Policy::RuleBlock(vec![
                Rule::grant(Condition::Taut),
                Rule::deny(Condition::Taut),
            ]),
        }
    }

    /// Recognises the canonical desugared form of a decision literal.
    pub fn as_literal(&self) -> Option<Decision> {
        Decision::ALL
            .into_iter()
            .find(|d| *self == Policy::literal(*d))
    }

    pub fn reference(name: impl Into<String>) -> Policy {
        Policy::Ref(name.into())
    }

    /// Priority composition `left >> right`: deny on left conflict, right on
    /// left undef, left otherwise.
    pub fn priority(left: Policy, right: Policy) -> Policy {
        Policy::Case(vec![
            CaseArm {
                guard: Guard::Conj(vec![(left.clone(), Decision::Conflict)]),
                body: Policy::literal(Decision::Deny),
            },
            CaseArm {
                guard: Guard::Conj(vec![(left.clone(), Decision::Undef)]),
                body: right,
            },
            CaseArm {
                guard: Guard::True,
                body: left,
            },
        ])
    }

    /// Names referenced anywhere inside this policy, in walk order.
    pub fn references(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Policy::RuleBlock(_) => {}
            Policy::Ref(name) => out.push(name),
            Policy::Case(arms) => {
                for arm in arms {
                    if let Guard::Conj(conj) = &arm.guard {
                        for (p, _) in conj {
                            p.collect_refs(out);
                        }
                    }
                    arm.body.collect_refs(out);
                }
            }
        }
    }

    /// Replaces every `Ref(name)` for which `f` returns a policy.
    pub fn substitute(&self, f: &impl Fn(&str) -> Option<Policy>) -> Policy {
        match self {
            Policy::RuleBlock(_) => self.clone(),
            Policy::Ref(name) => f(name).unwrap_or_else(|| self.clone()),
            Policy::Case(arms) => Policy::Case(
                arms.iter()
                    .map(|arm| CaseArm {
                        guard: match &arm.guard {
                            Guard::True => Guard::True,
                            Guard::Conj(conj) => Guard::Conj(
                                conj.iter().map(|(p, d)| (p.substitute(f), *d)).collect(),
                            ),
                        },
                        body: arm.body.substitute(f),
                    })
                    .collect(),
            ),
        }
    }

    /// Number of AST nodes, not following references.
    pub fn node_count(&self) -> usize {
        match self {
            Policy::Ref(_) => 1,
            Policy::RuleBlock(rules) => {
                1 + rules.iter().map(|r| 1 + r.condition.node_count()).sum::<usize>()
            }
            Policy::Case(arms) => {
                1 + arms
                    .iter()
                    .map(|arm| {
                        let guard = match &arm.guard {
                            Guard::True => 1,
                            Guard::Conj(conj) => {
                                1 + conj.iter().map(|(p, _)| 1 + p.node_count()).sum::<usize>()
                            }
                        };
                        1 + guard + arm.body.node_count()
                    })
                    .sum::<usize>()
            }
        }
    }
}

/// A named policy inside a document.
#[derive(Debug, Clone)]
pub struct Definition {
    pub name: String,
    pub policy: Policy,
    pub span: Span,
}

impl PartialEq for Definition {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.policy == other.policy
    }
}

/// Ordered policy definitions. Equality is structural and ignores spans.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicyDocument {
    pub definitions: Vec<Definition>,
}

impl PolicyDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn define(&mut self, name: impl Into<String>, policy: Policy) -> &mut Self {
        self.definitions.push(Definition {
            name: name.into(),
            policy,
            span: Span::default(),
        });
        self
    }

    pub fn with(mut self, name: impl Into<String>, policy: Policy) -> Self {
        self.define(name, policy);
        self
    }

    /// First definition with this name.
    pub fn get(&self, name: &str) -> Option<&Policy> {
        self.definitions
            .iter()
            .find(|d| d.name == name)
            .map(|d| &d.policy)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.definitions.iter().map(|d| d.name.as_str())
    }

    /// Inlines every reference, producing the tree a circuit compiler sees.
    /// Returns `None` on unresolved or cyclic references.
    pub fn expand(&self, policy: &Policy) -> Option<Policy> {
        self.expand_depth(policy, 0)
    }

    fn expand_depth(&self, policy: &Policy, depth: usize) -> Option<Policy> {
        if depth > self.definitions.len() {
            return None;
        }
        match policy {
            Policy::RuleBlock(_) => Some(policy.clone()),
            Policy::Ref(name) => self.expand_depth(self.get(name)?, depth + 1),
            Policy::Case(arms) => {
                let mut out = Vec::with_capacity(arms.len());
                for arm in arms {
                    let guard = match &arm.guard {
                        Guard::True => Guard::True,
                        Guard::Conj(conj) => Guard::Conj(
                            conj.iter()
                                .map(|(p, d)| Some((self.expand_depth(p, depth)?, *d)))
                                .collect::<Option<_>>()?,
                        ),
                    };
                    out.push(CaseArm {
                        guard,
                        body: self.expand_depth(&arm.body, depth)?,
                    });
                }
                Some(Policy::Case(out))
            }
        }
    }
}

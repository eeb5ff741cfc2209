//! Line-oriented circuit file:
//!
//! ```text
//! frostc 1
//! atoms N
//! <canonical atom>          (N lines)
//! gates M
//! <idx> <kind> [operands]   (M lines)
//! out <grant> <deny>
//! ```

use std::fmt::Write;

use crate::ast::Condition;
use crate::parser::parse_condition;

use super::{AtomTable, CircuitError, DualCircuit, Gate};

pub const HEADER: &str = "frostc 1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] CircuitError),
}

fn malformed(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Malformed {
        line,
        message: message.into(),
    }
}

pub fn serialize_circuit(c: &DualCircuit) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    let _ = writeln!(out, "atoms {}", c.table().len());
    for atom in c.table().atoms() {
        out.push_str(&atom.canonical());
        out.push('\n');
    }
    let _ = writeln!(out, "gates {}", c.gates().len());
    for (i, g) in c.gates().iter().enumerate() {
        let _ = match *g {
            Gate::TrueRail(a) => writeln!(out, "{i} input_t {a}"),
            Gate::FalseRail(a) => writeln!(out, "{i} input_f {a}"),
            Gate::Const0 => writeln!(out, "{i} const0"),
            Gate::Const1 => writeln!(out, "{i} const1"),
            Gate::And(l, r) => writeln!(out, "{i} and {l} {r}"),
            Gate::Or(l, r) => writeln!(out, "{i} or {l} {r}"),
            Gate::Not(x) => writeln!(out, "{i} not {x}"),
        };
    }
    let _ = writeln!(out, "out {} {}", c.grant_out(), c.deny_out());
    out
}

/// Parses and validates a circuit file. Atom lines must be in canonical
/// form so that serialization of the result reproduces the input exactly.
pub fn deserialize_circuit(text: &str) -> Result<DualCircuit, FormatError> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let lines: Vec<&str> = body.split('\n').collect();
    let mut cursor = 0usize;
    let mut next = |what: &str| -> Result<(usize, &str), FormatError> {
        let line = lines
            .get(cursor)
            .copied()
            .ok_or_else(|| malformed(cursor + 1, format!("unexpected end of file, expected {what}")))?;
        cursor += 1;
        Ok((cursor, line))
    };

    let (n, header) = next("header")?;
    if header != HEADER {
        return Err(malformed(n, format!("expected `{HEADER}`")));
    }
    let atom_count = count_line(next("atom count")?, "atoms")?;
    let mut table = AtomTable::new();
    for _ in 0..atom_count {
        let (n, line) = next("atom")?;
        let atom = match parse_condition(line) {
            Ok(Condition::Atom(a)) => a,
            Ok(_) => return Err(malformed(n, "expected a single atom")),
            Err(e) => return Err(malformed(n, e.message)),
        };
        if atom.canonical() != line {
            return Err(malformed(n, format!("atom not in canonical form (`{}`)", atom.canonical())));
        }
        if table.position(&atom).is_some() {
            return Err(malformed(n, "duplicate atom"));
        }
        table.intern(&atom);
    }

    let gate_count = count_line(next("gate count")?, "gates")?;
    let mut gates = Vec::with_capacity(gate_count);
    for i in 0..gate_count {
        let (n, line) = next("gate")?;
        let fields: Vec<&str> = line.split(' ').collect();
        let idx: usize = parse_index(n, fields[0])?;
        if idx != i {
            return Err(malformed(n, format!("gate index {idx}, expected {i}")));
        }
        let ops = |k: usize| -> Result<Vec<usize>, FormatError> {
            if fields.len() != 2 + k {
                return Err(malformed(n, format!("`{}` takes {k} operand(s)", fields[1])));
            }
            fields[2..].iter().map(|f| parse_index(n, f)).collect()
        };
        let gate = match fields.get(1).copied() {
            Some("input_t") => Gate::TrueRail(ops(1)?[0]),
            Some("input_f") => Gate::FalseRail(ops(1)?[0]),
            Some("const0") => {
                ops(0)?;
                Gate::Const0
            }
            Some("const1") => {
                ops(0)?;
                Gate::Const1
            }
            Some("and") => {
                let o = ops(2)?;
                Gate::And(o[0], o[1])
            }
            Some("or") => {
                let o = ops(2)?;
                Gate::Or(o[0], o[1])
            }
            Some("not") => Gate::Not(ops(1)?[0]),
            Some(other) => return Err(malformed(n, format!("unknown gate kind `{other}`"))),
            None => return Err(malformed(n, "missing gate kind")),
        };
        gates.push(gate);
    }

    let (n, footer) = next("output line")?;
    let fields: Vec<&str> = footer.split(' ').collect();
    if fields.len() != 3 || fields[0] != "out" {
        return Err(malformed(n, "expected `out <grant> <deny>`"));
    }
    let grant_out = parse_index(n, fields[1])?;
    let deny_out = parse_index(n, fields[2])?;
    if cursor != lines.len() {
        return Err(malformed(cursor + 1, "trailing content after output line"));
    }
    Ok(DualCircuit::new(table, gates, grant_out, deny_out)?)
}

fn count_line((n, line): (usize, &str), keyword: &str) -> Result<usize, FormatError> {
    line.strip_prefix(keyword)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| malformed(n, format!("expected `{keyword} <count>`")))
        .and_then(|count| parse_index(n, count))
}

/// Decimal without sign or leading zeros, so the text form is unique.
fn parse_index(line: usize, s: &str) -> Result<usize, FormatError> {
    let canonical = !s.is_empty()
        && s.bytes().all(|b| b.is_ascii_digit())
        && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return Err(malformed(line, format!("bad index `{s}`")));
    }
    s.parse()
        .map_err(|_| malformed(line, format!("index `{s}` out of range")))
}

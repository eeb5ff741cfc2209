use std::fmt::Write;

/// A literal: positive or negative variable index, never zero.
pub type Lit = i32;

/// Conjunctive normal form over variables `1..=variable_count`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    variable_count: usize,
    clauses: Vec<Vec<Lit>>,
    /// Set when an empty clause was added; the formula is then unsatisfiable.
    has_empty_clause: bool,
}

impl CnfFormula {
    pub fn new(variable_count: usize) -> Self {
        CnfFormula {
            variable_count,
            ..Default::default()
        }
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn has_empty_clause(&self) -> bool {
        self.has_empty_clause
    }

    /// Allocates a new variable.
    pub fn fresh_var(&mut self) -> Lit {
        self.variable_count += 1;
        self.variable_count as Lit
    }

    /// Panics on a literal outside `1..=variable_count`.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) {
        let clause: Vec<Lit> = lits.into_iter().collect();
        for &l in &clause {
            assert!(
                l != 0 && l.unsigned_abs() as usize <= self.variable_count,
                "literal {l} out of range 1..={}",
                self.variable_count
            );
        }
        if clause.is_empty() {
            self.has_empty_clause = true;
        } else {
            self.clauses.push(clause);
        }
    }

    /// True if `model[v]` (1-based, index 0 unused) satisfies every clause.
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        !self.has_empty_clause
            && self.clauses.iter().all(|c| {
                c.iter()
                    .any(|&l| model[l.unsigned_abs() as usize] == (l > 0))
            })
    }

    /// DIMACS text: `p cnf V C` header, one zero-terminated clause per line.
    pub fn to_dimacs(&self) -> String {
        let count = self.clauses.len() + usize::from(self.has_empty_clause);
        let mut out = format!("p cnf {} {}\n", self.variable_count, count);
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        if self.has_empty_clause {
            out.push_str("0\n");
        }
        out
    }
}

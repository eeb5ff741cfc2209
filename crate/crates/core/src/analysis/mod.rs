//! Satisfiability-based policy analysis.
//!
//! Atoms are treated as independent propositions: the analyser does not know
//! that `localTime <= 2000` and `localTime >= 2100` exclude each other. Dead
//! arm reports are therefore conservative (an arm dead only through
//! arithmetic is reported live) and reachability witnesses may combine atom
//! values no real request produces.

mod cnf;
mod queries;
mod sat;
mod tseitin;

pub use cnf::{CnfFormula, Lit};
pub use queries::{
    conflict_free, dead_arms, equivalent, reachable, AnalysisError, AnalysisOptions, ArmStatus,
    Equivalence, Reachability,
};
pub use sat::{solve, solve_with_budget, SatResult, DEFAULT_BUDGET};
pub use tseitin::{tseitin, VarMap};

/// Which atom values a query may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum KnowledgeMode {
    /// Every atom is true or false.
    Total,
    /// Atoms may also be unknown.
    #[default]
    Partial,
}

impl std::str::FromStr for KnowledgeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "total" => Ok(KnowledgeMode::Total),
            "partial" => Ok(KnowledgeMode::Partial),
            other => Err(format!("unknown mode `{other}` (expected total or partial)")),
        }
    }
}

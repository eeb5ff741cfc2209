use crate::ast::{Policy, PolicyDocument};
use crate::circuit::{eval_circuit, CircuitBuilder, CircuitError, DualCircuit, RailAssignment, TableEnv};
use crate::decision::Decision;
use crate::interp::selected_arm;

use super::sat::{solve_with_budget, SatResult, DEFAULT_BUDGET};
use super::tseitin::{tseitin, xor_var};
use super::KnowledgeMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Branching decisions allowed per solver call.
    pub budget: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("solver budget of {0} decisions exceeded")]
    BudgetExceeded(u64),
    #[error("policy is not a case statement")]
    NotACase,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("internal error: witness does not re-evaluate ({0})")]
    BadWitness(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reachability {
    Witness(RailAssignment),
    Unreachable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArmStatus {
    Dead,
    Live(RailAssignment),
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    Counterexample {
        rails: RailAssignment,
        left: Decision,
        right: Decision,
    },
}

fn run(
    f: &super::CnfFormula,
    opts: AnalysisOptions,
) -> Result<Option<Vec<bool>>, AnalysisError> {
    match solve_with_budget(f, opts.budget) {
        SatResult::Sat(model) => Ok(Some(model)),
        SatResult::Unsat => Ok(None),
        SatResult::BudgetExceeded => Err(AnalysisError::BudgetExceeded(opts.budget)),
    }
}

fn check_mode(rails: &RailAssignment, mode: KnowledgeMode) -> Result<(), AnalysisError> {
    if mode == KnowledgeMode::Total && rails.rails().iter().any(|r| !r.t && !r.f) {
        return Err(AnalysisError::BadWitness("unknown atom in total mode".into()));
    }
    Ok(())
}

/// Is there an admissible assignment under which `c` decides `d`?
pub fn reachable(
    c: &DualCircuit,
    d: Decision,
    mode: KnowledgeMode,
    opts: AnalysisOptions,
) -> Result<Reachability, AnalysisError> {
    let (mut f, map) = tseitin(c, mode);
    let (want_g, want_d) = d.bits();
    let g = map.gate(c.grant_out());
    let dn = map.gate(c.deny_out());
    f.add_clause([if want_g { g } else { -g }]);
    f.add_clause([if want_d { dn } else { -dn }]);
    let Some(model) = run(&f, opts)? else {
        return Ok(Reachability::Unreachable);
    };
    let rails = map.rails(&model);
    check_mode(&rails, mode)?;
    let got = eval_circuit(c, &rails)?;
    if got != d {
        return Err(AnalysisError::BadWitness(format!("expected {d}, evaluated {got}")));
    }
    Ok(Reachability::Witness(rails))
}

/// No admissible assignment yields `conflict`.
pub fn conflict_free(c: &DualCircuit, opts: AnalysisOptions) -> Result<bool, AnalysisError> {
    Ok(reachable(c, Decision::Conflict, KnowledgeMode::Partial, opts)? == Reachability::Unreachable)
}

/// Status of each arm of a case statement. An arm is dead when no
/// assignment selects it. Per-arm budget exhaustion is reported in place.
pub fn dead_arms(
    p: &Policy,
    doc: &PolicyDocument,
    mode: KnowledgeMode,
    opts: AnalysisOptions,
) -> Result<Vec<ArmStatus>, AnalysisError> {
    let arms = match doc.expand(p) {
        Some(Policy::Case(arms)) => arms,
        Some(_) => return Err(AnalysisError::NotACase),
        None => {
            // Surface the precise reference error.
            crate::circuit::collect_atoms(p, doc)?;
            return Err(AnalysisError::NotACase);
        }
    };
    let mut b = CircuitBuilder::new(doc);
    let case = Policy::Case(arms.clone());
    b.add_atoms(&case)?;
    let selectors = b.case_selectors(&arms)?;
    let zero = b.zero();
    let circuit = b.circuit(zero, zero);
    let (base, map) = tseitin(&circuit, mode);

    let mut out = Vec::with_capacity(arms.len());
    for (k, &sel) in selectors.iter().enumerate() {
        let mut f = base.clone();
        f.add_clause([map.gate(sel)]);
        let status = match run(&f, opts) {
            Err(AnalysisError::BudgetExceeded(_)) => ArmStatus::BudgetExceeded,
            Err(e) => return Err(e),
            Ok(None) => ArmStatus::Dead,
            Ok(Some(model)) => {
                let rails = map.rails(&model);
                check_mode(&rails, mode)?;
                let values = rails
                    .to_kleene()
                    .ok_or_else(|| AnalysisError::BadWitness("rail conflict".into()))?;
                let env = TableEnv {
                    table: circuit.table(),
                    values: &values,
                };
                let chosen = selected_arm(&arms, doc, &env)
                    .map_err(|e| AnalysisError::BadWitness(e.to_string()))?;
                if chosen != Some(k) {
                    return Err(AnalysisError::BadWitness(format!(
                        "arm {} expected, interpreter selected {chosen:?}",
                        k + 1
                    )));
                }
                ArmStatus::Live(rails)
            }
        };
        out.push(status);
    }
    Ok(out)
}

/// Do `p` and `q` decide identically on every admissible assignment over
/// their merged atom table?
pub fn equivalent(
    p: &Policy,
    q: &Policy,
    doc: &PolicyDocument,
    mode: KnowledgeMode,
    opts: AnalysisOptions,
) -> Result<Equivalence, AnalysisError> {
    let mut b = CircuitBuilder::new(doc);
    b.add_atoms(p)?;
    b.add_atoms(q)?;
    let (pg, pd) = b.compile(p)?;
    let (qg, qd) = b.compile(q)?;
    let left = b.circuit(pg, pd);
    let right = left.with_outputs(qg, qd)?;

    let (mut f, map) = tseitin(&left, mode);
    let dg = xor_var(&mut f, map.gate(pg), map.gate(qg));
    let dd = xor_var(&mut f, map.gate(pd), map.gate(qd));
    f.add_clause([dg, dd]);
    let Some(model) = run(&f, opts)? else {
        return Ok(Equivalence::Equivalent);
    };
    let rails = map.rails(&model);
    check_mode(&rails, mode)?;
    let dp = eval_circuit(&left, &rails)?;
    let dq = eval_circuit(&right, &rails)?;
    if dp == dq {
        return Err(AnalysisError::BadWitness(format!("both sides decide {dp}")));
    }
    Ok(Equivalence::Counterexample {
        rails,
        left: dp,
        right: dq,
    })
}

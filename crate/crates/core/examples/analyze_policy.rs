// Static checks: dead case arms, decision reachability, conflict freedom
// and equivalence, all decided by the built-in SAT solver.

use frost::analysis::{
    conflict_free, dead_arms, equivalent, reachable, AnalysisOptions, ArmStatus, Equivalence, KnowledgeMode,
    Reachability,
};
use frost::circuit::compile_policy;
use frost::decision::Decision;
use frost::parser;

const SRC: &str = "
policy P = grant if a == 1;
policy Q = deny if b == 1;
policy shadowed = case { [true : P] [P eval undef : Q] };
policy both = grant if a == 1; deny if b == 1;
policy both_swapped = deny if b == 1; grant if a == 1;
";

fn run_example() -> Result<Vec<String>, Box<dyn std::error::Error>> {
    let doc = parser::load(SRC)?;
    let opts = AnalysisOptions::default();
    let mut report = Vec::new();

    let arms = dead_arms(doc.get("shadowed").unwrap(), &doc, KnowledgeMode::Partial, opts)?;
    for (k, status) in arms.iter().enumerate() {
        if *status == ArmStatus::Dead {
            report.push(format!("shadowed: arm {} is dead", k + 1));
        }
    }

    let both = compile_policy(doc.get("both").unwrap(), &doc)?;
    if let Reachability::Witness(rails) = reachable(&both, Decision::Conflict, KnowledgeMode::Total, opts)? {
        report.push(format!("both: conflict reachable with rails {:?}", rails.to_kleene().unwrap()));
    }
    report.push(format!("both: conflict-free = {}", conflict_free(&both, opts)?));

    let eq = equivalent(
        doc.get("both").unwrap(),
        doc.get("both_swapped").unwrap(),
        &doc,
        KnowledgeMode::Partial,
        opts,
    )?;
    report.push(format!("rule order irrelevant: {}", eq == Equivalence::Equivalent));
    Ok(report)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}

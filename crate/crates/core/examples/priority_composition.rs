// Tabulate the priority case statement `P >> Q` over all constant
// decisions for P and Q.

use frost::ast::{Policy, PolicyDocument};
use frost::decision::Decision;
use frost::interp::{eval_policy, AttributeAssignment};
use frost::{parser, samples};

type Row = (Decision, Decision, Decision);

fn run_example() -> Result<Vec<Row>, Box<dyn std::error::Error>> {
    let doc = parser::load(samples::PRIORITY)?;
    let pq = doc.get("PQ").unwrap().clone();
    let mut rows = Vec::new();
    for p in Decision::ALL {
        for q in Decision::ALL {
            let inst = PolicyDocument::new().with("P", Policy::literal(p)).with("Q", Policy::literal(q));
            rows.push((p, q, eval_policy(&pq, &inst, &AttributeAssignment::new())?));
        }
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<9} {:<9} P>>Q", "P", "Q");
    for (p, q, r) in run_example()? {
        println!("{p:<9} {q:<9} {r}");
    }
    Ok(())
}

// Compile a policy to its grant/deny circuit pair, evaluate it on
// three-valued inputs, and round-trip the circuit file format.

use frost::circuit::{compile_policy, deserialize_circuit, eval_circuit, serialize_circuit, RailAssignment};
use frost::decision::{Decision, Kleene};
use frost::{parser, samples};

fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let doc = parser::load(samples::PRIORITY)?;
    let c = compile_policy(doc.get("PQ").expect("defined"), &doc)?;
    println!("{} atoms, {} gates", c.table().len(), c.gates().len());

    // Atoms are a, b, c, d in first-occurrence order.
    let all_true = RailAssignment::uniform(c.table().len(), Kleene::True);
    assert_eq!(eval_circuit(&c, &all_true)?, Decision::Deny);
    let q_only = RailAssignment::from_kleene([Kleene::False, Kleene::Unknown, Kleene::True, Kleene::False]);
    assert_eq!(eval_circuit(&c, &q_only)?, Decision::Grant);

    let text = serialize_circuit(&c);
    assert_eq!(deserialize_circuit(&text)?, c);
    Ok(text)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}

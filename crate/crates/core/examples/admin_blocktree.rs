// Drive a policy through its lifecycle and log its versions in a
// tamper-evident blocktree.

use frost::admin::{circuit_digest, transition, AdminAction, Blocktree, LifecycleState};
use frost::circuit::compile_policy;
use frost::parser;

fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let mut state = LifecycleState::Draft;
    for action in [AdminAction::Activate, AdminAction::Suspend, AdminAction::Resume] {
        state = transition(state, action)?;
        println!("{action} -> {state}");
    }
    assert!(transition(state, AdminAction::Resume).is_err());

    let mut tree = Blocktree::new();
    for (ts, src) in [(100, "policy p = grant if a == 1;"), (200, "policy p = grant if a == 1 && b == 2;")] {
        let doc = parser::load(src)?;
        let c = compile_policy(doc.get("p").unwrap(), &doc)?;
        let node = tree.append_version("p", circuit_digest(&c), ts)?;
        println!("logged p v{} {}", node.version, hex::encode(&node.id[..8]));
    }
    tree.append_version("q", [7; 32], 150)?;
    assert!(tree.verify().is_empty());

    // A one-byte change in the stored text is caught on reload.
    let text = tree.to_text();
    let tampered = text.replacen(" 100\n", " 101\n", 1);
    let corrupt = Blocktree::from_text(&tampered)?.verify();
    println!("{} corrupt node(s) after tampering", corrupt.len());
    assert!(!corrupt.is_empty());
    Ok(text)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}

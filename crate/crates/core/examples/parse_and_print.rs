// Parse a policy file, validate it, and print it back in canonical form.

use frost::parser;
use frost::samples;

fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let doc = parser::load(samples::PRIORITY)?;
    let printed = parser::pretty_print(&doc);
    // Canonical text parses back to the same document.
    assert_eq!(parser::load(&printed)?, doc);

    // Semantic errors carry a position and the offending policy.
    match parser::load("policy A = B;\npolicy B = case { [A eval grant : deny] };") {
        Err(parser::FrontendError::Semantic(errors)) => {
            for e in &errors {
                eprintln!("diagnostic: {e}");
            }
        }
        other => panic!("expected a cycle error, got {other:?}"),
    }
    Ok(printed)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}

// Build an OEM -> dealer -> leaseholder delegation chain, verify it, and
// evaluate the owner-priority composition.

use frost::decision::Decision;
use frost::delegation::{ActorId, CompositionOp, DelegationChain, KeyedHash, KeyedHashSigner, Signer};
use frost::interp::{eval_policy, AttributeAssignment};
use frost::parser;

const POLICIES: &str = r#"
policy oem = deny if blacklisted == true;
policy dealer = grant if action == "unlock";
policy lease = grant if action == "drive" && mileage < 20000; deny if action == "sell";
"#;

fn actor(name: &str) -> (ActorId, KeyedHashSigner) {
    let key = format!("{name}-demo-key").into_bytes();
    (ActorId::new(name, key.clone()).unwrap(), KeyedHashSigner::new(key))
}

fn run_example() -> Result<Vec<(String, Decision)>, Box<dyn std::error::Error>> {
    let (oem, oem_key) = actor("oem");
    let (dealer, dealer_key) = actor("dealer");
    let (lessee, _) = actor("leaseholder");

    let chain = DelegationChain::init(
        oem.clone(),
        "car-1",
        CompositionOp::Priority,
        "oem",
        parser::load(POLICIES)?,
        &oem_key,
    )?;
    let sig = oem_key.sign(&chain.next_link_message(&dealer, "dealer"));
    let chain = chain.extend(oem, dealer.clone(), "dealer", sig, &KeyedHash)?;
    let sig = dealer_key.sign(&chain.next_link_message(&lessee, "lease"));
    let chain = chain.extend(dealer, lessee, "lease", sig, &KeyedHash)?;
    assert_eq!(chain.verify(&KeyedHash), Ok(()));

    // Chains survive a trip through their JSON file format.
    let chain = DelegationChain::from_json(&chain.to_json())?;
    let composed = chain.compose(&KeyedHash)?;

    let cases = [
        ("unlock, clean", AttributeAssignment::new().with("blacklisted", false).with("action", "unlock")),
        ("unlock, blacklisted", AttributeAssignment::new().with("blacklisted", true).with("action", "unlock")),
        (
            "drive, clean",
            AttributeAssignment::new()
                .with("blacklisted", false)
                .with("action", "drive")
                .with("mileage", 1200),
        ),
        ("sell, clean", AttributeAssignment::new().with("blacklisted", false).with("action", "sell")),
    ];
    let mut out = Vec::new();
    for (label, attrs) in cases {
        out.push((label.to_string(), eval_policy(&composed, &chain.document, &attrs)?));
    }

    // Tampering with a signed field is pinpointed.
    let mut forged = chain.clone();
    forged.links[2].policy_name = "dealer".into();
    assert_eq!(forged.verify(&KeyedHash), Err(2));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (label, d) in run_example()? {
        println!("{label}: {d}");
    }
    Ok(())
}

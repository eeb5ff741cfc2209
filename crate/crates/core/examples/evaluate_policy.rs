// Evaluate the daughter-drives-the-car policy with the reference
// interpreter over plain attribute maps.

use frost::ast::TimeOfDay;
use frost::decision::Decision;
use frost::interp::{eval_policy, AttributeAssignment};
use frost::{parser, samples};

fn attrs(hour: u16) -> AttributeAssignment {
    AttributeAssignment::new()
        .with("object", "vehicle")
        .with("subject", "alice")
        .with("vehicle.owner.daughter", "alice")
        .with("action", "driveVehicle")
        .with("owner.daughter.driversLicense", "valid")
        .with("localTime", TimeOfDay::from_hm(hour, 0).unwrap())
}

fn run_example() -> Result<Vec<(u16, Decision)>, Box<dyn std::error::Error>> {
    let doc = parser::load(samples::DAUGHTER_DRIVE)?;
    let policy = doc.get("daughter_drive").expect("defined in the sample");
    let mut out = Vec::new();
    for hour in [8, 10, 20, 21] {
        out.push((hour, eval_policy(policy, &doc, &attrs(hour))?));
    }
    // A missing attribute makes its atom unknown; the rule does not fire.
    let mut no_license = attrs(10);
    no_license.remove("owner.daughter.driversLicense");
    assert_eq!(eval_policy(policy, &doc, &no_license)?, Decision::Undef);
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (hour, d) in run_example()? {
        println!("{hour:02}:00 -> {d}");
    }
    Ok(())
}

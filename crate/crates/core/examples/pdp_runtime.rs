// Install a logged, active circuit into a decision point and decide
// requests whose attributes come from pluggable information points.

use frost::admin::{circuit_digest, Blocktree, LifecycleState};
use frost::ast::TimeOfDay;
use frost::circuit::compile_policy;
use frost::decision::Decision;
use frost::runtime::{enforce, AccessRequest, Enforcement, Pdp, PipRegistry, StaticResolver};
use frost::{parser, samples};

type Row = (u16, Decision, Enforcement);

fn run_example() -> Result<Vec<Row>, Box<dyn std::error::Error>> {
    let doc = parser::load(samples::DAUGHTER_DRIVE)?;
    let circuit = compile_policy(doc.get("daughter_drive").unwrap(), &doc)?;
    let mut tree = Blocktree::new();
    tree.append_version("daughter_drive", circuit_digest(&circuit), 1_700_000_000)?;

    // Registry data lives outside the request.
    let pip = PipRegistry::new()
        .with("vehicle", StaticResolver::default().with("vehicle.owner.daughter", "alice"))?
        .with("owner", StaticResolver::default().with("owner.daughter.driversLicense", "valid"))?;
    let pdp = Pdp::new(pip);
    pdp.install_policy("car-1", circuit, "daughter_drive", &tree, LifecycleState::Active)?;

    let mut out = Vec::new();
    for hour in [10, 21] {
        let req = AccessRequest::new("driveVehicle")?
            .subject("id", "alice")
            .object("id", "vehicle")
            .env("localTime", TimeOfDay::from_hm(hour, 0).unwrap());
        let trace = pdp.decide("car-1", &req)?;
        for (atom, value) in &trace.atoms {
            eprintln!("  {atom}: {}", value.as_str());
        }
        out.push((hour, trace.decision, enforce(trace.decision)));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (hour, d, e) in run_example()? {
        println!("{hour:02}:00 -> {d} ({e})");
    }
    Ok(())
}

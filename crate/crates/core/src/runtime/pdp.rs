use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

use crate::admin::{circuit_digest, Blocktree, Digest, LifecycleState};
use crate::ast::Atom;
use crate::circuit::{eval_circuit, CircuitError, DualCircuit, RailAssignment};
use crate::decision::{Decision, Kleene};

use super::pip::{atom_values, PipRegistry};
use super::request::AccessRequest;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuntimeError {
    #[error("policy `{policy_id}` is {state}, only active policies can be installed")]
    NotActive { policy_id: String, state: LifecycleState },
    #[error("blocktree has no versions of `{0}`")]
    NoHead(String),
    #[error("circuit hash does not match the blocktree head of `{0}`")]
    HashMismatch(String),
    #[error("blocktree fails verification ({0} corrupt nodes)")]
    CorruptTree(usize),
    #[error("no policy installed for asset `{0}`")]
    UnknownAsset(String),
    #[error("resolver prefix `{0}` is under a reserved root")]
    ReservedRoot(String),
    #[error("invalid resolver prefix `{0}`")]
    BadPrefix(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Enforcement {
    Permit,
    DenyAccess,
}

impl Enforcement {
    pub fn as_str(self) -> &'static str {
        match self {
            Enforcement::Permit => "permit",
            Enforcement::DenyAccess => "deny-access",
        }
    }
}

impl fmt::Display for Enforcement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Default-deny: only `grant` permits.
pub fn enforce(d: Decision) -> Enforcement {
    match d {
        Decision::Grant => Enforcement::Permit,
        Decision::Deny | Decision::Conflict | Decision::Undef => Enforcement::DenyAccess,
    }
}

/// Enforcement point with a host-specific decision mapping.
#[derive(Debug, Clone, Copy)]
pub struct Pep {
    mapping: fn(Decision) -> Enforcement,
}

impl Default for Pep {
    fn default() -> Self {
        Pep { mapping: enforce }
    }
}

impl Pep {
    pub fn new(mapping: fn(Decision) -> Enforcement) -> Self {
        Pep { mapping }
    }

    pub fn apply(&self, d: Decision) -> Enforcement {
        (self.mapping)(d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTrace {
    pub decision: Decision,
    /// Value of every atom in the circuit's table, in table order.
    pub atoms: Vec<(Atom, Kleene)>,
    pub elapsed: Duration,
}

impl DecisionTrace {
    pub fn rails(&self) -> RailAssignment {
        RailAssignment::from_kleene(self.atoms.iter().map(|(_, k)| *k))
    }
}

/// Resolves and evaluates without any installation checks.
pub fn evaluate(circuit: &DualCircuit, req: &AccessRequest, pip: &PipRegistry) -> Result<DecisionTrace, RuntimeError> {
    let start = Instant::now();
    let values = atom_values(req, pip, circuit.table());
    let decision = eval_circuit(circuit, &RailAssignment::from_kleene(values.iter().copied()))?;
    Ok(DecisionTrace {
        decision,
        atoms: circuit.table().atoms().iter().cloned().zip(values).collect(),
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Installed {
    pub circuit: DualCircuit,
    pub policy_id: String,
    pub lifecycle: LifecycleState,
    pub head: Digest,
}

/// Decision point. `decide` takes a read lock only long enough to clone the
/// asset's binding, so concurrent requests never see a half-installed
/// circuit.
#[derive(Debug, Default)]
pub struct Pdp {
    installed: RwLock<HashMap<String, Arc<Installed>>>,
    pip: PipRegistry,
}

impl Pdp {
    pub fn new(pip: PipRegistry) -> Self {
        Pdp {
            installed: RwLock::default(),
            pip,
        }
    }

    pub fn pip(&self) -> &PipRegistry {
        &self.pip
    }

    /// Binds `asset` to `circuit` after checking that the policy is active,
    /// the tree verifies, and the circuit is the logged head version.
    pub fn install_policy(
        &self,
        asset: &str,
        circuit: DualCircuit,
        policy_id: &str,
        tree: &Blocktree,
        lifecycle: LifecycleState,
    ) -> Result<(), RuntimeError> {
        if lifecycle != LifecycleState::Active {
            return Err(RuntimeError::NotActive {
                policy_id: policy_id.to_string(),
                state: lifecycle,
            });
        }
        let corrupt = tree.verify();
        if !corrupt.is_empty() {
            return Err(RuntimeError::CorruptTree(corrupt.len()));
        }
        let head = tree
            .head(policy_id)
            .ok_or_else(|| RuntimeError::NoHead(policy_id.to_string()))?;
        if head.payload_hash != circuit_digest(&circuit) {
            return Err(RuntimeError::HashMismatch(policy_id.to_string()));
        }
        let binding = Arc::new(Installed {
            circuit,
            policy_id: policy_id.to_string(),
            lifecycle,
            head: head.id,
        });
        self.installed
            .write()
            .expect("install lock poisoned")
            .insert(asset.to_string(), binding);
        Ok(())
    }

    pub fn installed(&self, asset: &str) -> Option<Arc<Installed>> {
        self.installed.read().expect("install lock poisoned").get(asset).cloned()
    }

    pub fn decide(&self, asset: &str, req: &AccessRequest) -> Result<DecisionTrace, RuntimeError> {
        let binding = self
            .installed(asset)
            .ok_or_else(|| RuntimeError::UnknownAsset(asset.to_string()))?;
        evaluate(&binding.circuit, req, &self.pip)
    }
}

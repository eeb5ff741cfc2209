//! Delegation chains from an asset owner to the executing agent.
//!
//! Every link is signed by its issuer over a canonical byte encoding. The
//! chain's policies are folded left, owner first, with the operator the
//! owner chose when creating the chain.

use std::collections::BTreeSet;

use base64::Engine as _;
use hmac::{Hmac, KeyInit, Mac};
use serde::{Deserialize, Serialize};
use sha2::Sha256;

use crate::ast::{CaseArm, Guard, Policy, PolicyDocument};
use crate::decision::Decision;
use crate::parser::{self, SemanticErrorKind};

/// Formal parameters of a named composition template.
pub const LEFT_HOLE: &str = "L";
pub const RIGHT_HOLE: &str = "R";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActorId {
    pub name: String,
    /// Verification key material.
    #[serde(with = "hex_bytes")]
    pub key: Vec<u8>,
}

impl ActorId {
    pub fn new(name: impl Into<String>, key: impl Into<Vec<u8>>) -> Result<Self, DelegationError> {
        let actor = ActorId {
            name: name.into(),
            key: key.into(),
        };
        actor.check()?;
        Ok(actor)
    }

    fn check(&self) -> Result<(), DelegationError> {
        if self.name.is_empty() || self.key.is_empty() {
            return Err(DelegationError::BadActor(self.name.clone()));
        }
        Ok(())
    }
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        hex::decode(text).map_err(serde::de::Error::custom)
    }
}

/// Produces signatures with a private key.
pub trait Signer {
    fn sign(&self, message: &[u8]) -> Vec<u8>;
}

/// Checks signatures against an actor's verification key.
pub trait Verifier {
    fn verify(&self, key: &[u8], message: &[u8], signature: &[u8]) -> bool;
}

/// HMAC-SHA256 tag. Symmetric: the verification key is the signing key, so
/// this suits single-operator deployments and tests, not mutually
/// distrusting parties.
#[derive(Debug, Clone, Copy, Default)]
pub struct KeyedHash;

/// [`KeyedHash`] signer holding its key.
#[derive(Debug, Clone)]
pub struct KeyedHashSigner {
    key: Vec<u8>,
}

impl KeyedHashSigner {
    pub fn new(key: impl Into<Vec<u8>>) -> Self {
        KeyedHashSigner { key: key.into() }
    }
}

fn hmac(key: &[u8], message: &[u8]) -> Hmac<Sha256> {
    let mut mac = <Hmac<Sha256> as KeyInit>::new_from_slice(key).expect("HMAC accepts any key length");
    mac.update(message);
    mac
}

impl Signer for KeyedHashSigner {
    fn sign(&self, message: &[u8]) -> Vec<u8> {
        hmac(&self.key, message).finalize().into_bytes().to_vec()
    }
}

impl Verifier for KeyedHash {
    fn verify(&self, key: &[u8], message: &[u8], signature: &[u8]) -> bool {
        hmac(key, message).verify_slice(signature).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompositionOp {
    /// `left >> right`: deny on left conflict, right on left undef, else left.
    Priority,
    /// Knowledge join of both decisions.
    Join,
    /// A case template in the chain document over the holes `L` and `R`.
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub issuer: ActorId,
    pub delegate: ActorId,
    #[serde(rename = "policy")]
    pub policy_name: String,
    #[serde(rename = "sig", with = "base64_bytes")]
    pub signature: Vec<u8>,
}

mod base64_bytes {
    use base64::Engine as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&base64::engine::general_purpose::STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        base64::engine::general_purpose::STANDARD
            .decode(text)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelegationChain {
    pub owner: ActorId,
    pub asset: String,
    pub op: CompositionOp,
    pub links: Vec<ChainLink>,
    pub document: PolicyDocument,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DelegationError {
    #[error("actor `{0}` needs a nonempty name and key")]
    BadActor(String),
    #[error("policy `{0}` is not defined in the chain document")]
    UnresolvedPolicy(String),
    #[error("template `{name}` must reference exactly the holes L and R (found {found:?})")]
    BadTemplate { name: String, found: Vec<String> },
    #[error("issuer `{got}` is not the chain tail `{expected}`")]
    WrongIssuer { expected: String, got: String },
    #[error("signature on link {0} does not verify")]
    BadSignature(usize),
    #[error("policy `{0}` is already defined in the chain document")]
    DuplicatePolicy(String),
    #[error("chain verification failed at link {0}")]
    Verification(usize),
    #[error("chain document: {0}")]
    Document(String),
    #[error("chain file: {0}")]
    Json(String),
}

/// Length-prefixed encoding of the signed fields of link `index`.
pub fn link_message(asset: &str, issuer: &str, delegate: &str, policy: &str, index: u64) -> Vec<u8> {
    let mut out = Vec::new();
    for field in [asset, issuer, delegate, policy] {
        out.extend_from_slice(&(field.len() as u32).to_be_bytes());
        out.extend_from_slice(field.as_bytes());
    }
    out.extend_from_slice(&8u32.to_be_bytes());
    out.extend_from_slice(&index.to_be_bytes());
    out
}

fn template_holes(doc: &PolicyDocument, name: &str) -> Result<(), DelegationError> {
    let template = doc
        .get(name)
        .ok_or_else(|| DelegationError::UnresolvedPolicy(name.to_string()))?;
    let found: BTreeSet<&str> = template.references().into_iter().collect();
    let expected: BTreeSet<&str> = [LEFT_HOLE, RIGHT_HOLE].into_iter().collect();
    if found != expected {
        return Err(DelegationError::BadTemplate {
            name: name.to_string(),
            found: found.into_iter().map(String::from).collect(),
        });
    }
    Ok(())
}

/// Validates a chain document. Template holes are the only references
/// allowed to stay unresolved.
pub fn validate_chain_document(doc: &PolicyDocument, op: &CompositionOp) -> Result<(), DelegationError> {
    if let CompositionOp::Named(name) = op {
        template_holes(doc, name)?;
    }
    if let Err(errors) = parser::validate_document(doc) {
        let real: Vec<_> = errors
            .into_iter()
            .filter(|e| {
                !matches!(
                    (&e.kind, op),
                    (SemanticErrorKind::UnresolvedRef { from, target }, CompositionOp::Named(t))
                        if from == t && (target == LEFT_HOLE || target == RIGHT_HOLE)
                )
            })
            .collect();
        if let Some(first) = real.first() {
            return Err(DelegationError::Document(first.to_string()));
        }
    }
    Ok(())
}

impl DelegationChain {
    /// Starts a chain with the owner's self-issued, self-signed root link.
    pub fn init(
        owner: ActorId,
        asset: impl Into<String>,
        op: CompositionOp,
        owner_policy: &str,
        document: PolicyDocument,
        owner_signer: &dyn Signer,
    ) -> Result<Self, DelegationError> {
        owner.check()?;
        let asset = asset.into();
        if document.get(owner_policy).is_none() {
            return Err(DelegationError::UnresolvedPolicy(owner_policy.to_string()));
        }
        validate_chain_document(&document, &op)?;
        let message = link_message(&asset, &owner.name, &owner.name, owner_policy, 0);
        let root = ChainLink {
            issuer: owner.clone(),
            delegate: owner.clone(),
            policy_name: owner_policy.to_string(),
            signature: owner_signer.sign(&message),
        };
        Ok(DelegationChain {
            owner,
            asset,
            op,
            links: vec![root],
            document,
        })
    }

    /// The actor that may issue the next link.
    pub fn tail(&self) -> &ActorId {
        &self.links.last().expect("chains always hold the root link").delegate
    }

    /// Bytes the next link's issuer must sign.
    pub fn next_link_message(&self, delegate: &ActorId, policy_name: &str) -> Vec<u8> {
        link_message(
            &self.asset,
            &self.tail().name,
            &delegate.name,
            policy_name,
            self.links.len() as u64,
        )
    }

    /// Adds policy definitions submitted by a delegate.
    pub fn submit_policies(&self, policies: &PolicyDocument) -> Result<Self, DelegationError> {
        let mut next = self.clone();
        for def in &policies.definitions {
            if next.document.get(&def.name).is_some() {
                return Err(DelegationError::DuplicatePolicy(def.name.clone()));
            }
            next.document.definitions.push(def.clone());
        }
        validate_chain_document(&next.document, &next.op)?;
        Ok(next)
    }

    /// Returns the chain with one more link; `self` is unchanged.
    pub fn extend(
        &self,
        issuer: ActorId,
        delegate: ActorId,
        policy_name: &str,
        signature: Vec<u8>,
        verifier: &dyn Verifier,
    ) -> Result<Self, DelegationError> {
        delegate.check()?;
        if &issuer != self.tail() {
            return Err(DelegationError::WrongIssuer {
                expected: self.tail().name.clone(),
                got: issuer.name,
            });
        }
        if self.document.get(policy_name).is_none() {
            return Err(DelegationError::UnresolvedPolicy(policy_name.to_string()));
        }
        let message = self.next_link_message(&delegate, policy_name);
        if !verifier.verify(&issuer.key, &message, &signature) {
            return Err(DelegationError::BadSignature(self.links.len()));
        }
        let mut next = self.clone();
        next.links.push(ChainLink {
            issuer,
            delegate,
            policy_name: policy_name.to_string(),
            signature,
        });
        Ok(next)
    }

    /// `Err(k)` for the earliest link `k` that breaks ordering, names an
    /// undefined policy or carries a bad signature.
    pub fn verify(&self, verifier: &dyn Verifier) -> Result<(), usize> {
        if self.links.is_empty() {
            return Err(0);
        }
        for (k, link) in self.links.iter().enumerate() {
            let expected_issuer = if k == 0 { &self.owner } else { &self.links[k - 1].delegate };
            let ordered = &link.issuer == expected_issuer && (k > 0 || link.delegate == self.owner);
            let message = link_message(
                &self.asset,
                &link.issuer.name,
                &link.delegate.name,
                &link.policy_name,
                k as u64,
            );
            if !ordered
                || self.document.get(&link.policy_name).is_none()
                || !verifier.verify(&link.issuer.key, &message, &link.signature)
            {
                return Err(k);
            }
        }
        Ok(())
    }

    /// Folds the link policies left with the chain operator. Leaves are
    /// references into [`DelegationChain::document`].
    pub fn compose(&self, verifier: &dyn Verifier) -> Result<Policy, DelegationError> {
        self.verify(verifier).map_err(DelegationError::Verification)?;
        if let CompositionOp::Named(name) = &self.op {
            template_holes(&self.document, name)?;
        }
        let mut leaves = self.links.iter().map(|l| Policy::reference(&l.policy_name));
        let first = leaves.next().expect("verified chains are nonempty");
        Ok(leaves.fold(first, |acc, next| self.combine(acc, next)))
    }

    fn combine(&self, left: Policy, right: Policy) -> Policy {
        match &self.op {
            CompositionOp::Priority => Policy::priority(left, right),
            CompositionOp::Join => join_policy(left, right),
            CompositionOp::Named(name) => {
                let template = self.document.get(name).expect("template checked before folding");
                template.substitute(&|hole| match hole {
                    LEFT_HOLE => Some(left.clone()),
                    RIGHT_HOLE => Some(right.clone()),
                    _ => None,
                })
            }
        }
    }
}

/// Case statement whose decision is the knowledge join of both operands.
pub fn join_policy(left: Policy, right: Policy) -> Policy {
    let test = |p: &Policy, d| (p.clone(), d);
    let arm = |guard, d| CaseArm {
        guard: Guard::Conj(guard),
        body: Policy::literal(d),
    };
    Policy::Case(vec![
        CaseArm {
            guard: Guard::Conj(vec![test(&left, Decision::Undef)]),
            body: right.clone(),
        },
        CaseArm {
            guard: Guard::Conj(vec![test(&right, Decision::Undef)]),
            body: left.clone(),
        },
        arm(
            vec![test(&left, Decision::Grant), test(&right, Decision::Grant)],
            Decision::Grant,
        ),
        arm(
            vec![test(&left, Decision::Deny), test(&right, Decision::Deny)],
            Decision::Deny,
        ),
        CaseArm {
            guard: Guard::True,
            body: Policy::literal(Decision::Conflict),
        },
    ])
}

/// On-disk chain: canonical field order, inline `.frost` policies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub asset: String,
    pub op: CompositionOp,
    pub owner: ActorId,
    pub links: Vec<ChainLink>,
    pub policies: String,
}

impl DelegationChain {
    pub fn to_file(&self) -> ChainFile {
        ChainFile {
            asset: self.asset.clone(),
            op: self.op.clone(),
            owner: self.owner.clone(),
            links: self.links.clone(),
            policies: parser::pretty_print(&self.document),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("chain files serialize") + "\n"
    }

    pub fn from_file(file: ChainFile) -> Result<Self, DelegationError> {
        let document =
            parser::parse(&file.policies).map_err(|e| DelegationError::Document(e.to_string()))?;
        validate_chain_document(&document, &file.op)?;
        Ok(DelegationChain {
            owner: file.owner,
            asset: file.asset,
            op: file.op,
            links: file.links,
            document,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, DelegationError> {
        let file: ChainFile =
            serde_json::from_str(text).map_err(|e| DelegationError::Json(e.to_string()))?;
        Self::from_file(file)
    }
}

/// Base64 text of a signature, as stored in chain files.
pub fn encode_signature(sig: &[u8]) -> String {
    base64::engine::general_purpose::STANDARD.encode(sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{eval_policy, AttributeAssignment};
    use crate::parser::load;

    fn actor(name: &str) -> (ActorId, KeyedHashSigner) {
        let key = format!("{name}-secret").into_bytes();
        (ActorId::new(name, key.clone()).unwrap(), KeyedHashSigner::new(key))
    }

    fn three_link_chain() -> DelegationChain {
        let doc = load(
            "policy oem_root = deny if blacklisted == true;\n\
             policy dealer = grant if action == \"unlock\";\n\
             policy lease = grant if action == \"drive\"; deny if speed > 130;",
        )
        .unwrap();
        let (oem, oem_key) = actor("oem");
        let (dealer, dealer_key) = actor("dealer");
        let (lessee, _) = actor("leaseholder");
        let chain = DelegationChain::init(oem.clone(), "car-1", CompositionOp::Priority, "oem_root", doc, &oem_key)
            .unwrap();
        let sig = oem_key.sign(&chain.next_link_message(&dealer, "dealer"));
        let chain = chain.extend(oem, dealer.clone(), "dealer", sig, &KeyedHash).unwrap();
        let sig = dealer_key.sign(&chain.next_link_message(&lessee, "lease"));
        chain.extend(dealer, lessee, "lease", sig, &KeyedHash).unwrap()
    }

    #[test]
    fn root_link_is_self_issued() {
        let doc = load("policy oem_root = deny if blacklisted == true;").unwrap();
        let (oem, key) = actor("oem");
        let chain = DelegationChain::init(oem.clone(), "car-1", CompositionOp::Priority, "oem_root", doc, &key)
            .unwrap();
        assert_eq!(chain.links.len(), 1);
        assert_eq!(chain.links[0].issuer, oem);
        assert_eq!(chain.links[0].delegate, oem);
        assert_eq!(chain.verify(&KeyedHash), Ok(()));
    }

    #[test]
    fn init_rejects_unknown_policy_and_bad_templates() {
        let doc = load("policy p = grant if a == 1;").unwrap();
        let (oem, key) = actor("oem");
        assert_eq!(
            DelegationChain::init(oem.clone(), "a", CompositionOp::Priority, "nope", doc.clone(), &key),
            Err(DelegationError::UnresolvedPolicy("nope".into()))
        );
        let doc = parser::parse("policy p = grant if a == 1;\npolicy one_hole = case { [L eval grant : L] };")
            .unwrap();
        assert!(matches!(
            DelegationChain::init(oem, "a", CompositionOp::Named("one_hole".into()), "p", doc, &key),
            Err(DelegationError::BadTemplate { .. })
        ));
    }

    #[test]
    fn three_link_chain_verifies() {
        let chain = three_link_chain();
        assert_eq!(chain.links.len(), 3);
        assert_eq!(chain.verify(&KeyedHash), Ok(()));
    }

    #[test]
    fn extend_checks_issuer_and_signature() {
        let chain = three_link_chain();
        let (oem, oem_key) = actor("oem");
        let (other, _) = actor("other");
        let sig = oem_key.sign(&chain.next_link_message(&other, "dealer"));
        assert!(matches!(
            chain.extend(oem, other.clone(), "dealer", sig, &KeyedHash),
            Err(DelegationError::WrongIssuer { .. })
        ));

        let (lessee, lessee_key) = actor("leaseholder");
        let mut sig = lessee_key.sign(&chain.next_link_message(&other, "lease"));
        sig[0] ^= 1;
        assert_eq!(
            chain.extend(lessee, other, "lease", sig, &KeyedHash),
            Err(DelegationError::BadSignature(3))
        );
    }

    #[test]
    fn tampering_is_located() {
        let mut chain = three_link_chain();
        chain.links[2].policy_name = "dealer".into();
        assert_eq!(chain.verify(&KeyedHash), Err(2));

        let mut chain = three_link_chain();
        chain.links.swap(1, 2);
        assert_eq!(chain.verify(&KeyedHash), Err(1));
    }

    #[test]
    fn priority_composition_keeps_owner_denials() {
        let doc = load(
            "policy owner = deny if blacklisted == true;\npolicy dealer = grant if action == \"unlock\";",
        )
        .unwrap();
        let (oem, oem_key) = actor("oem");
        let (dealer, _) = actor("dealer");
        let chain = DelegationChain::init(oem.clone(), "car-1", CompositionOp::Priority, "owner", doc, &oem_key)
            .unwrap();
        let sig = oem_key.sign(&chain.next_link_message(&dealer, "dealer"));
        let chain = chain.extend(oem, dealer, "dealer", sig, &KeyedHash).unwrap();
        let composed = chain.compose(&KeyedHash).unwrap();

        let blacklisted = AttributeAssignment::new().with("blacklisted", true).with("action", "unlock");
        assert_eq!(eval_policy(&composed, &chain.document, &blacklisted).unwrap(), Decision::Deny);
        let clean = AttributeAssignment::new().with("blacklisted", false).with("action", "unlock");
        assert_eq!(eval_policy(&composed, &chain.document, &clean).unwrap(), Decision::Grant);
    }

    #[test]
    fn single_link_composes_to_owner_policy() {
        let doc = load("policy owner = deny if blacklisted == true;").unwrap();
        let (oem, key) = actor("oem");
        let chain = DelegationChain::init(oem, "car-1", CompositionOp::Join, "owner", doc, &key).unwrap();
        assert_eq!(chain.compose(&KeyedHash).unwrap(), Policy::reference("owner"));
    }

    #[test]
    fn fold_is_left_nested() {
        let chain = three_link_chain();
        let expected = Policy::priority(
            Policy::priority(Policy::reference("oem_root"), Policy::reference("dealer")),
            Policy::reference("lease"),
        );
        assert_eq!(chain.compose(&KeyedHash).unwrap(), expected);
    }

    #[test]
    fn join_policy_matches_knowledge_join() {
        for a in Decision::ALL {
            for b in Decision::ALL {
                let doc = PolicyDocument::new()
                    .with("A", Policy::literal(a))
                    .with("B", Policy::literal(b));
                let p = join_policy(Policy::reference("A"), Policy::reference("B"));
                assert_eq!(eval_policy(&p, &doc, &AttributeAssignment::new()).unwrap(), a.join(b));
            }
        }
    }

    #[test]
    fn named_template_substitutes_holes() {
        let doc = parser::parse(
            "policy owner = deny if x == 1;\npolicy other = grant if y == 1;\n\
             policy deny_wins = case { [L eval deny : deny] [R eval deny : deny] [true : R] };",
        )
        .unwrap();
        let (oem, key) = actor("oem");
        let chain =
            DelegationChain::init(oem.clone(), "a", CompositionOp::Named("deny_wins".into()), "owner", doc, &key)
                .unwrap();
        let (d, _) = actor("d");
        let sig = key.sign(&chain.next_link_message(&d, "other"));
        let chain = chain.extend(oem, d, "other", sig, &KeyedHash).unwrap();
        let composed = chain.compose(&KeyedHash).unwrap();
        assert!(composed.references().iter().all(|r| *r == "owner" || *r == "other"));
        let attrs = AttributeAssignment::new().with("x", 1).with("y", 1);
        assert_eq!(eval_policy(&composed, &chain.document, &attrs).unwrap(), Decision::Deny);
    }

    #[test]
    fn json_round_trip() {
        let chain = three_link_chain();
        let json = chain.to_json();
        let back = DelegationChain::from_json(&json).unwrap();
        assert_eq!(back, chain);
        assert_eq!(back.to_json(), json);
        let keys: Vec<_> = serde_json::from_str::<serde_json::Value>(&json)
            .unwrap()
            .as_object()
            .unwrap()
            .keys()
            .cloned()
            .collect();
        assert_eq!(keys.len(), 5);
        assert!(json.find("\"asset\"").unwrap() < json.find("\"op\"").unwrap());
        assert!(json.find("\"links\"").unwrap() < json.find("\"policies\"").unwrap());
    }
}

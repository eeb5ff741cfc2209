use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use sha2::{Digest as _, Sha256};

use crate::ast::is_identifier;
use crate::circuit::{serialize_circuit, DualCircuit};

pub type Digest = [u8; 32];

/// Parent of every version-1 node.
pub const ROOT: Digest = [0; 32];

/// Recorded in the file header so readers know how to re-verify.
pub const HASH_ALG: &str = "sha256";

const HEADER_PREFIX: &str = "frosttree 1";

fn hash(bytes: &[u8]) -> Digest {
    Sha256::digest(bytes).into()
}

pub fn payload_digest(bytes: &[u8]) -> Digest {
    hash(bytes)
}

/// Digest of the canonical serialized form of a circuit.
pub fn circuit_digest(c: &DualCircuit) -> Digest {
    payload_digest(serialize_circuit(c).as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlocktreeNode {
    pub id: Digest,
    pub parent: Digest,
    pub policy_id: String,
    pub version: u64,
    pub payload_hash: Digest,
    pub timestamp: i64,
}

impl BlocktreeNode {
    pub fn compute_id(
        parent: &Digest,
        policy_id: &str,
        version: u64,
        payload_hash: &Digest,
        timestamp: i64,
    ) -> Digest {
        let mut bytes = Vec::with_capacity(96 + policy_id.len());
        bytes.extend_from_slice(parent);
        bytes.extend_from_slice(&(policy_id.len() as u32).to_be_bytes());
        bytes.extend_from_slice(policy_id.as_bytes());
        bytes.extend_from_slice(&version.to_be_bytes());
        bytes.extend_from_slice(payload_hash);
        bytes.extend_from_slice(&timestamp.to_be_bytes());
        hash(&bytes)
    }

    pub fn expected_id(&self) -> Digest {
        Self::compute_id(
            &self.parent,
            &self.policy_id,
            self.version,
            &self.payload_hash,
            self.timestamp,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("`{0}` is not a valid policy id")]
    BadPolicyId(String),
    #[error("timestamp {got} precedes head timestamp {head} of `{policy_id}`")]
    TimestampRegression { policy_id: String, head: i64, got: i64 },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Append-only version log, one linear branch per policy id under a shared
/// root. Nodes are kept in append order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Blocktree {
    nodes: Vec<BlocktreeNode>,
    heads: BTreeMap<String, Digest>,
}

impl Blocktree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[BlocktreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn heads(&self) -> &BTreeMap<String, Digest> {
        &self.heads
    }

    pub fn node(&self, id: &Digest) -> Option<&BlocktreeNode> {
        self.nodes.iter().find(|n| &n.id == id)
    }

    pub fn head(&self, policy_id: &str) -> Option<&BlocktreeNode> {
        self.heads.get(policy_id).and_then(|id| self.node(id))
    }

    /// Versions of one policy, newest first.
    pub fn history(&self, policy_id: &str) -> Vec<&BlocktreeNode> {
        let index: HashMap<&Digest, &BlocktreeNode> = self.nodes.iter().map(|n| (&n.id, n)).collect();
        let mut out = Vec::new();
        let mut cur = self.heads.get(policy_id);
        while let Some(node) = cur.and_then(|id| index.get(id)) {
            if out.len() > self.nodes.len() {
                break;
            }
            out.push(*node);
            cur = Some(&node.parent);
        }
        out
    }

    /// Appends the next version of `policy_id`. Earlier nodes are never
    /// touched; clone the tree first to keep a snapshot.
    pub fn append_version(
        &mut self,
        policy_id: &str,
        payload_hash: Digest,
        timestamp: i64,
    ) -> Result<BlocktreeNode, TreeError> {
        if !is_identifier(policy_id) {
            return Err(TreeError::BadPolicyId(policy_id.to_string()));
        }
        let (parent, version) = match self.head(policy_id) {
            None => (ROOT, 1),
            Some(head) => {
                if timestamp < head.timestamp {
                    return Err(TreeError::TimestampRegression {
                        policy_id: policy_id.to_string(),
                        head: head.timestamp,
                        got: timestamp,
                    });
                }
                (head.id, head.version + 1)
            }
        };
        let node = BlocktreeNode {
            id: BlocktreeNode::compute_id(&parent, policy_id, version, &payload_hash, timestamp),
            parent,
            policy_id: policy_id.to_string(),
            version,
            payload_hash,
            timestamp,
        };
        self.heads.insert(policy_id.to_string(), node.id);
        self.nodes.push(node.clone());
        Ok(node)
    }

    /// Stored ids of every node that fails a check, sorted and deduplicated.
    /// Empty means the tree verifies.
    pub fn verify(&self) -> Vec<Digest> {
        let mut bad = BTreeSet::new();
        let mut by_id: HashMap<Digest, &BlocktreeNode> = HashMap::new();
        for n in &self.nodes {
            let duplicate = by_id.insert(n.id, n).is_some();
            if duplicate || n.expected_id() != n.id {
                bad.insert(n.id);
            }
        }
        let mut children: HashMap<Digest, usize> = HashMap::new();
        for n in &self.nodes {
            *children.entry(n.parent).or_default() += 1;
            let linked = if n.version == 1 {
                n.parent == ROOT
            } else {
                match by_id.get(&n.parent) {
                    Some(p) => {
                        p.policy_id == n.policy_id
                            && p.version.checked_add(1) == Some(n.version)
                            && p.timestamp <= n.timestamp
                    }
                    None => false,
                }
            };
            if !linked || n.version == 0 {
                bad.insert(n.id);
            }
        }
        // Linear branches: no node may have two children.
        for n in &self.nodes {
            if n.parent != ROOT && children.get(&n.parent).copied().unwrap_or(0) > 1 {
                bad.insert(n.id);
            }
        }
        // Every node must lie on the path from its policy's head to the root.
        let mut reached = BTreeSet::new();
        for (policy, head) in &self.heads {
            let mut cur = *head;
            let mut steps = 0;
            while cur != ROOT && steps <= self.nodes.len() {
                match by_id.get(&cur) {
                    Some(n) if &n.policy_id == policy => {
                        reached.insert(cur);
                        cur = n.parent;
                    }
                    _ => break,
                }
                steps += 1;
            }
        }
        for n in &self.nodes {
            if !reached.contains(&n.id) {
                bad.insert(n.id);
            }
        }
        bad.into_iter().collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER_PREFIX} {HASH_ALG}\n");
        for n in &self.nodes {
            writeln!(
                out,
                "node {} {} {} {} {} {}",
                hex::encode(n.id),
                hex::encode(n.parent),
                n.policy_id,
                n.version,
                hex::encode(n.payload_hash),
                n.timestamp
            )
            .unwrap();
        }
        out
    }

    /// Reads the stored fields verbatim; integrity is checked separately by
    /// [`Blocktree::verify`]. Heads are the last node per policy in file order.
    pub fn from_text(text: &str) -> Result<Self, TreeError> {
        let malformed = |line: usize, message: String| TreeError::Malformed { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, header)) if header == format!("{HEADER_PREFIX} {HASH_ALG}") => {}
            Some((_, header)) if header.starts_with(HEADER_PREFIX) => {
                return Err(malformed(1, format!("unsupported hash algorithm in `{header}`")))
            }
            _ => return Err(malformed(1, format!("expected header `{HEADER_PREFIX} {HASH_ALG}`"))),
        }
        let mut tree = Blocktree::new();
        for (line, content) in lines {
            let fields: Vec<&str> = content.split(' ').collect();
            if fields.len() != 7 || fields[0] != "node" {
                return Err(malformed(line, "expected `node <id> <parent> <policy> <version> <payload> <ts>`".into()));
            }
            let digest = |s: &str| -> Result<Digest, TreeError> {
                let bytes = hex::decode(s).map_err(|e| malformed(line, format!("bad digest: {e}")))?;
                bytes
                    .try_into()
                    .map_err(|_| malformed(line, "digest must be 32 bytes".into()))
            };
            if !is_identifier(fields[3]) {
                return Err(malformed(line, format!("bad policy id `{}`", fields[3])));
            }
            let version = fields[4]
                .parse::<u64>()
                .map_err(|e| malformed(line, format!("bad version: {e}")))?;
            let timestamp = fields[6]
                .parse::<i64>()
                .map_err(|e| malformed(line, format!("bad timestamp: {e}")))?;
            let node = BlocktreeNode {
                id: digest(fields[1])?,
                parent: digest(fields[2])?,
                policy_id: fields[3].to_string(),
                version,
                payload_hash: digest(fields[5])?,
                timestamp,
            };
            tree.heads.insert(node.policy_id.clone(), node.id);
            tree.nodes.push(node);
        }
        Ok(tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn payload(n: u8) -> Digest {
        payload_digest(&[n])
    }

    #[test]
    fn genesis_and_second_version() {
        let mut t = Blocktree::new();
        let v1 = t.append_version("daughter_drive", payload(1), 100).unwrap();
        assert_eq!((v1.version, v1.parent), (1, ROOT));
        let v2 = t.append_version("daughter_drive", payload(2), 100).unwrap();
        assert_eq!((v2.version, v2.parent), (2, v1.id));
        assert_eq!(t.head("daughter_drive"), Some(&v2));
        assert_eq!(t.history("daughter_drive"), vec![&v2, &v1]);
    }

    #[test]
    fn policies_shard_into_branches() {
        let mut t = Blocktree::new();
        let a = t.append_version("a", payload(1), 1).unwrap();
        let b = t.append_version("b", payload(1), 1).unwrap();
        assert_eq!(t.heads().len(), 2);
        assert_eq!(a.parent, ROOT);
        assert_eq!(b.parent, ROOT);
        assert_ne!(a.id, b.id);
    }

    #[test]
    fn timestamp_regression_is_rejected() {
        let mut t = Blocktree::new();
        t.append_version("a", payload(1), 10).unwrap();
        assert!(matches!(
            t.append_version("a", payload(2), 9),
            Err(TreeError::TimestampRegression { .. })
        ));
        assert!(t.append_version("a b", payload(2), 11).is_err());
    }

    #[test]
    fn append_only() {
        let mut t = Blocktree::new();
        let mut seen = Vec::new();
        for i in 0..6u8 {
            seen.push(t.append_version(if i % 2 == 0 { "p" } else { "q" }, payload(i), i as i64).unwrap());
            assert_eq!(&t.nodes()[..seen.len()], &seen[..]);
        }
    }

    fn five_nodes() -> Blocktree {
        let mut t = Blocktree::new();
        for i in 0..5u8 {
            t.append_version(if i < 3 { "p" } else { "q" }, payload(i), 10 * i as i64).unwrap();
        }
        t
    }

    #[test]
    fn untampered_tree_verifies_and_round_trips() {
        let t = five_nodes();
        assert!(t.verify().is_empty());
        let text = t.to_text();
        assert!(text.starts_with("frosttree 1 sha256\n"));
        let back = Blocktree::from_text(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn payload_flip_reports_node_and_child() {
        let mut t = five_nodes();
        t.nodes[0].payload_hash[0] ^= 1;
        let bad = t.verify();
        assert!(bad.contains(&t.nodes[0].id));
        // The child still links to the stored id, so only node 0 is corrupt.
        let child = t.nodes[1].clone();
        assert!(!bad.contains(&child.id));
    }

    #[test]
    fn rewritten_id_breaks_child_link() {
        let mut t = five_nodes();
        t.nodes[1].payload_hash[3] ^= 0x80;
        t.nodes[1].id = t.nodes[1].expected_id();
        let bad = t.verify();
        assert!(bad.contains(&t.nodes[2].id), "child of rewritten node must fail");
    }

    #[test]
    fn version_gap_is_a_violation() {
        let mut t = Blocktree::new();
        let v1 = t.append_version("p", payload(1), 1).unwrap();
        let id = BlocktreeNode::compute_id(&v1.id, "p", 3, &payload(3), 2);
        t.nodes.push(BlocktreeNode {
            id,
            parent: v1.id,
            policy_id: "p".into(),
            version: 3,
            payload_hash: payload(3),
            timestamp: 2,
        });
        t.heads.insert("p".into(), id);
        assert_eq!(t.verify(), vec![id]);
    }

    #[test]
    fn rejects_unknown_algorithm() {
        assert!(Blocktree::from_text("frosttree 1 md5\n").is_err());
        assert!(Blocktree::from_text("").is_err());
    }
}

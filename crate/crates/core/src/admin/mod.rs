//! Policy administration: the lifecycle automaton and the blocktree
//! integrity log of installed policy versions.

mod blocktree;
mod lifecycle;

pub use blocktree::{
    circuit_digest, payload_digest, Blocktree, BlocktreeNode, Digest, TreeError, HASH_ALG, ROOT,
};
pub use lifecycle::{transition, AdminAction, LifecycleState, TransitionRejected};

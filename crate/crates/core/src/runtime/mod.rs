//! Decision runtime: information points resolve request attributes, the
//! decision point evaluates installed circuits, and the enforcement point
//! maps decisions to outcomes.

mod pdp;
mod pip;
mod request;

pub use pdp::{enforce, evaluate, DecisionTrace, Enforcement, Installed, Pdp, Pep, RuntimeError};
pub use pip::{resolve_attributes, PipRegistry, Resolver, StaticResolver, RESERVED_ROOTS};
pub use request::{AccessRequest, RequestError};

//! FROST: a four-valued access-control policy language.
//!
//! Policies are parsed ([`parser`]), checked, and then either interpreted
//! directly ([`interp`]) or compiled to dual-rail boolean circuits
//! ([`circuit`]) that the SAT-backed [`analysis`] module can query.
//! [`delegation`] composes policies along signed delegation chains,
//! [`admin`] tracks versions in a hash-linked log, and [`runtime`] wires
//! everything into a decision point with attribute resolvers.
//!
//! The `examples/` directory has one runnable program per capability.

pub mod admin;
pub mod analysis;
pub mod ast;
pub mod circuit;
pub mod cli;
pub mod decision;
pub mod delegation;
pub mod interp;
pub mod parser;
pub mod runtime;
pub mod samples;

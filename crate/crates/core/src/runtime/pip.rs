use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ast::{AttrPath, Value};
use crate::circuit::{AtomTable, RailAssignment};
use crate::decision::Kleene;
use crate::interp::{eval_atom, Attributes};

use super::pdp::RuntimeError;
use super::request::AccessRequest;

/// Path roots answered from the request itself.
pub const RESERVED_ROOTS: [&str; 4] = ["subject", "object", "action", "environment"];

/// A policy information point. Must be callable from many threads.
pub trait Resolver: Send + Sync {
    fn resolve(&self, path: &AttrPath, req: &AccessRequest) -> Option<Value>;
}

impl<F> Resolver for F
where
    F: Fn(&AttrPath, &AccessRequest) -> Option<Value> + Send + Sync,
{
    fn resolve(&self, path: &AttrPath, req: &AccessRequest) -> Option<Value> {
        self(path, req)
    }
}

/// Fixed path → value table.
#[derive(Debug, Clone, Default)]
pub struct StaticResolver(pub BTreeMap<AttrPath, Value>);

impl StaticResolver {
    pub fn with(mut self, dotted: &str, value: impl Into<Value>) -> Self {
        self.0.insert(AttrPath::parse(dotted).expect("valid attribute path"), value.into());
        self
    }
}

impl Resolver for StaticResolver {
    fn resolve(&self, path: &AttrPath, _req: &AccessRequest) -> Option<Value> {
        self.0.get(path).cloned()
    }
}

/// Ordered resolvers keyed by path prefix.
///
/// Lookup order: reserved roots come from the request; otherwise the first
/// registered prefix that matches answers (an unknown from it is final);
/// paths nobody claims are looked up in the request environment under
/// their full dotted name.
#[derive(Clone, Default)]
pub struct PipRegistry {
    resolvers: Vec<(AttrPath, Arc<dyn Resolver>)>,
}

impl std::fmt::Debug for PipRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.resolvers.iter().map(|(p, _)| p.to_string())).finish()
    }
}

impl PipRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, prefix: &str, resolver: impl Resolver + 'static) -> Result<&mut Self, RuntimeError> {
        let path = AttrPath::parse(prefix).map_err(|_| RuntimeError::BadPrefix(prefix.to_string()))?;
        if RESERVED_ROOTS.contains(&path.root()) {
            return Err(RuntimeError::ReservedRoot(prefix.to_string()));
        }
        self.resolvers.push((path, Arc::new(resolver)));
        Ok(self)
    }

    pub fn with(mut self, prefix: &str, resolver: impl Resolver + 'static) -> Result<Self, RuntimeError> {
        self.register(prefix, resolver)?;
        Ok(self)
    }

    pub fn resolve(&self, path: &AttrPath, req: &AccessRequest) -> Option<Value> {
        let rest = || path.segments()[1..].join(".");
        match path.root() {
            "action" if path.segments().len() == 1 => Some(Value::Str(req.action.clone())),
            "action" => None,
            "subject" | "object" => {
                let map = if path.root() == "subject" { &req.subject } else { &req.object };
                let key = if path.segments().len() == 1 { "id".to_string() } else { rest() };
                map.get(&key).cloned()
            }
            "environment" => req.environment.get(&rest()).cloned(),
            _ => match self.resolvers.iter().find(|(prefix, _)| path.starts_with(prefix)) {
                Some((_, r)) => r.resolve(path, req),
                None => req.environment.get(&path.to_string()).cloned(),
            },
        }
    }
}

struct Bound<'a> {
    pip: &'a PipRegistry,
    req: &'a AccessRequest,
}

impl Attributes for Bound<'_> {
    fn resolve(&self, path: &AttrPath) -> Option<Value> {
        self.pip.resolve(path, self.req)
    }
}

/// Rails for every atom of `table`. Unresolved or incomparable operands
/// give `(0,0)`.
pub fn resolve_attributes(req: &AccessRequest, pip: &PipRegistry, table: &AtomTable) -> RailAssignment {
    let attrs = Bound { pip, req };
    RailAssignment::from_kleene(table.atoms().iter().map(|a| eval_atom(a, &attrs)))
}

pub(crate) fn atom_values(req: &AccessRequest, pip: &PipRegistry, table: &AtomTable) -> Vec<Kleene> {
    let attrs = Bound { pip, req };
    table.atoms().iter().map(|a| eval_atom(a, &attrs)).collect()
}

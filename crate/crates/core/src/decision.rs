//! The four-valued decision space and the three-valued truth values that
//! conditions evaluate to.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A policy decision: an element of the Belnap lattice.
///
/// Every decision corresponds to exactly one `(grant, deny)` bit pair:
///
/// | decision   | g | d |
/// |------------|---|---|
/// | `Undef`    | 0 | 0 |
/// | `Grant`    | 1 | 0 |
/// | `Deny`     | 0 | 1 |
/// | `Conflict` | 1 | 1 |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Grant,
    Deny,
    Conflict,
    Undef,
}

impl Decision {
    pub const ALL: [Decision; 4] = [
        Decision::Grant,
        Decision::Deny,
        Decision::Conflict,
        Decision::Undef,
    ];

    /// Decodes a `(grant, deny)` rail pair.
    pub const fn from_bits(grant: bool, deny: bool) -> Self {
        match (grant, deny) {
            (true, false) => Decision::Grant,
            (false, true) => Decision::Deny,
            (true, true) => Decision::Conflict,
            (false, false) => Decision::Undef,
        }
    }

    /// The `(grant, deny)` rail pair for this decision.
    pub const fn bits(self) -> (bool, bool) {
        match self {
            Decision::Grant => (true, false),
            Decision::Deny => (false, true),
            Decision::Conflict => (true, true),
            Decision::Undef => (false, false),
        }
    }

    /// Join in the knowledge order: bitwise OR of the rail pairs.
    ///
    /// `Undef` is the identity and `Conflict` is absorbing.
    pub const fn join(self, other: Decision) -> Decision {
        let (g1, d1) = self.bits();
        let (g2, d2) = other.bits();
        Decision::from_bits(g1 | g2, d1 | d2)
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            Decision::Grant => "grant",
            Decision::Deny => "deny",
            Decision::Conflict => "conflict",
            Decision::Undef => "undef",
        }
    }
}

/// Free-function form of [`Decision::join`].
pub fn knowledge_join(a: Decision, b: Decision) -> Decision {
    a.join(b)
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown decision `{0}` (expected grant, deny, conflict or undef)")]
pub struct UnknownDecision(pub String);

impl FromStr for Decision {
    type Err = UnknownDecision;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grant" => Ok(Decision::Grant),
            "deny" => Ok(Decision::Deny),
            "conflict" => Ok(Decision::Conflict),
            "undef" => Ok(Decision::Undef),
            other => Err(UnknownDecision(other.to_string())),
        }
    }
}

/// Strong Kleene truth value. `Unknown` stands for a missing or
/// unresolvable attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kleene {
    True,
    False,
    Unknown,
}

impl Kleene {
    pub const ALL: [Kleene; 3] = [Kleene::True, Kleene::False, Kleene::Unknown];

    pub const fn and(self, other: Kleene) -> Kleene {
        match (self, other) {
            (Kleene::False, _) | (_, Kleene::False) => Kleene::False,
            (Kleene::True, Kleene::True) => Kleene::True,
            _ => Kleene::Unknown,
        }
    }

    pub const fn or(self, other: Kleene) -> Kleene {
        match (self, other) {
            (Kleene::True, _) | (_, Kleene::True) => Kleene::True,
            (Kleene::False, Kleene::False) => Kleene::False,
            _ => Kleene::Unknown,
        }
    }

    pub const fn not(self) -> Kleene {
        match self {
            Kleene::True => Kleene::False,
            Kleene::False => Kleene::True,
            Kleene::Unknown => Kleene::Unknown,
        }
    }

    pub const fn is_true(self) -> bool {
        matches!(self, Kleene::True)
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            Kleene::True => "true",
            Kleene::False => "false",
            Kleene::Unknown => "unknown",
        }
    }
}

impl From<bool> for Kleene {
    fn from(b: bool) -> Self {
        if b {
            Kleene::True
        } else {
            Kleene::False
        }
    }
}

impl fmt::Display for Kleene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

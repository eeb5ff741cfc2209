use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LifecycleState {
    Draft,
    Active,
    Suspended,
    Retired,
}

impl LifecycleState {
    pub const ALL: [LifecycleState; 4] = [
        LifecycleState::Draft,
        LifecycleState::Active,
        LifecycleState::Suspended,
        LifecycleState::Retired,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LifecycleState::Draft => "draft",
            LifecycleState::Active => "active",
            LifecycleState::Suspended => "suspended",
            LifecycleState::Retired => "retired",
        }
    }
}

/// `submit` is the action that creates a policy; it never moves an
/// existing one, so it has no entry in the transition table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdminAction {
    Submit,
    Activate,
    Suspend,
    Resume,
    Retire,
}

impl AdminAction {
    pub const ALL: [AdminAction; 5] = [
        AdminAction::Submit,
        AdminAction::Activate,
        AdminAction::Suspend,
        AdminAction::Resume,
        AdminAction::Retire,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AdminAction::Submit => "submit",
            AdminAction::Activate => "activate",
            AdminAction::Suspend => "suspend",
            AdminAction::Resume => "resume",
            AdminAction::Retire => "retire",
        }
    }
}

impl fmt::Display for LifecycleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl fmt::Display for AdminAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for LifecycleState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown lifecycle state `{s}`"))
    }
}

impl FromStr for AdminAction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown admin action `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("action `{action}` is not permitted in state `{state}`")]
pub struct TransitionRejected {
    pub state: LifecycleState,
    pub action: AdminAction,
}

pub fn transition(state: LifecycleState, action: AdminAction) -> Result<LifecycleState, TransitionRejected> {
    use AdminAction::*;
    use LifecycleState::*;
    match (state, action) {
        (Draft, Activate) => Ok(Active),
        (Active, Suspend) => Ok(Suspended),
        (Suspended, Resume) => Ok(Active),
        (Draft | Active | Suspended, Retire) => Ok(Retired),
        _ => Err(TransitionRejected { state, action }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        use AdminAction::*;
        use LifecycleState::*;
        assert_eq!(transition(Draft, Activate), Ok(Active));
        assert!(transition(Retired, Activate).is_err());
        assert_eq!(
            transition(Active, Resume),
            Err(TransitionRejected { state: Active, action: Resume })
        );
    }

    #[test]
    fn retired_is_absorbing() {
        for a in AdminAction::ALL {
            assert!(transition(LifecycleState::Retired, a).is_err());
        }
    }

    #[test]
    fn names_round_trip() {
        for s in LifecycleState::ALL {
            assert_eq!(s.to_string().parse::<LifecycleState>(), Ok(s));
        }
        for a in AdminAction::ALL {
            assert_eq!(a.to_string().parse::<AdminAction>(), Ok(a));
        }
    }
}

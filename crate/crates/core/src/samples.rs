//! Sample policies shipped with the crate (also under `policies/`).

/// A single grant rule over six conjoined atoms: the owner's daughter may
/// drive the vehicle between 09:00 and 20:00 with a valid licence.
pub const DAUGHTER_DRIVE: &str = include_str!("../policies/daughter_drive.frost");

/// Priority composition `PQ = P >> Q` as a three-arm case statement, with
/// `P` and `Q` each a grant rule plus a deny rule over their own atoms.
pub const PRIORITY: &str = include_str!("../policies/priority.frost");

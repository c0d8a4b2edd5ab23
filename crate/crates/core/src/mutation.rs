//! Deliberately injected bugs used to show that the verification suites are
//! not vacuous. Production paths always pass `None`.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeededBug {
    /// Blocking digraph rule (c) emits `(y, x)` instead of `(x, y)`.
    FlipArcRule,
    /// Marker pairs skip the independent-set filter.
    WeakMarkerFilter,
    /// Subset-sum table never extends a reachable value by the next class.
    DropDpExtend,
}

impl SeededBug {
    pub const ALL: [SeededBug; 3] = [SeededBug::FlipArcRule, SeededBug::WeakMarkerFilter, SeededBug::DropDpExtend];

    pub fn tag(self) -> &'static str {
        match self {
            SeededBug::FlipArcRule => "flip-arc-rule",
            SeededBug::WeakMarkerFilter => "weak-marker-filter",
            SeededBug::DropDpExtend => "drop-dp-extend",
        }
    }
}

impl fmt::Display for SeededBug {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SeededBug {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        SeededBug::ALL
            .into_iter()
            .find(|b| b.tag() == s)
            .ok_or_else(|| Error::Input(format!("unknown seeded bug {s}")))
    }
}

/// True when `bug` is the active injected fault.
pub(crate) fn active(faults: Option<SeededBug>, bug: SeededBug) -> bool {
    faults == Some(bug)
}

//! Level quotients `G_n = G / st_G(n)` of a defined group, subgroup images
//! in them, coset tests modulo level stabilizers, congruence scans and the
//! branching-criterion hypothesis checker.
//!
//! Every subgroup `N` is handled through its images `N_n = N·st_G(n)/st_G(n)`,
//! so a membership test at level `n` decides membership in `N·st_G(n)`
//! exactly. Rigid stabilizers of a quotient may be larger than the image
//! of the true rigid stabilizer; equalities involving them are evidence at
//! the given level, while memberships of embedded elements are exact.

mod checks;
mod scan;
mod theorem;
mod tower;
pub mod tree;

use std::fmt;

pub use scan::{ScanReport, Verdict};
pub use theorem::{Hypothesis, HypothesisCheck, TheoremReport};
pub use tower::{describe, Caps, LevelContext, QuotientStore, Subgroup, Tower};

/// One checked fact at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub claim: String,
    pub level: usize,
    /// The witnessing element, in word notation when one was found.
    pub element: Option<String>,
    pub holds: bool,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verb = if self.holds { "holds" } else { "fails" };
        write!(f, "{} {verb} at level {}", self.claim, self.level)?;
        if let Some(e) = &self.element {
            write!(f, ", witness {e}")?;
        }
        Ok(())
    }
}

//! Verification suites: a YAML document naming a group file and a list of
//! checks.
//!
//! ```yaml
//! name: basilica
//! group: ../groups/basilica.grp     # relative to the suite file
//! checks:
//!   - id: commutator-sections
//!     kind: equal
//!     args: ["[a, b^-1]", "(b, b^-1)"]
//!   - id: ladder-1
//!     kind: coset_member
//!     args: ["b^2", Gprime]
//!     levels: [2, 3]
//!     expect_each: [true, false]
//! ```
//!
//! A check runs once per level in `levels` (or once at `level`); it expects
//! `expect` at every level, or the matching entry of `expect_each`. A check
//! may name its own `group` file.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_yaml::Value;

use crate::CliError;

/// What a check computes. Suite files spell kinds in snake case; the
/// command line also accepts kebab case.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// Two elements are equal as automata.
    #[default]
    Equal,
    /// `|G_n|`.
    QuotientOrder,
    /// `|G_n : N_n|`, or `|M_n : N_n|` with a second argument `M`.
    QuotientIndex,
    /// `|N_n|`.
    SeriesOrder,
    /// Nilpotency class of `G_n / N_n`.
    Class,
    /// `g ∈ N·st_G(n)`.
    CosetMember,
    /// Every first-level section of `g` lies in `H·st_G(n - 1)`.
    PullbackMember,
    /// Per-coordinate membership of the sections of `g` in `H·st_G(n - 1)`.
    Profile,
    /// The product of the two sections of `g` lies in `H·st_G(n - 1)`.
    SectionsProduct,
    /// `X_n ≤ Y_n`.
    Contained,
    /// `X_n = Y_n`.
    SubgroupEqual,
    /// `X_n = Y_n` where a side involves rigid stabilizers.
    RistEvidence,
    /// Each generator of `X` at level `n - 1`, placed below any first-level
    /// vertex, lies in `Y_n`.
    EmbeddedGenerators,
    /// Every generator of `X_n` passes the pullback test for `H`.
    PullbackGenerators,
    /// Smallest `k` with `st(k) ≤ N` at every level up to the check level.
    CongruenceScan,
    /// Hypotheses of the branching criterion for `(R, H)`.
    Theorem1,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Equal => "equal",
            Kind::QuotientOrder => "quotient_order",
            Kind::QuotientIndex => "quotient_index",
            Kind::SeriesOrder => "series_order",
            Kind::Class => "class",
            Kind::CosetMember => "coset_member",
            Kind::PullbackMember => "pullback_member",
            Kind::Profile => "profile",
            Kind::SectionsProduct => "sections_product",
            Kind::Contained => "contained",
            Kind::SubgroupEqual => "subgroup_equal",
            Kind::RistEvidence => "rist_evidence",
            Kind::EmbeddedGenerators => "embedded_generators",
            Kind::PullbackGenerators => "pullback_generators",
            Kind::CongruenceScan => "congruence_scan",
            Kind::Theorem1 => "theorem1",
        }
    }

    /// Accepted argument counts.
    pub fn arity(self) -> &'static [usize] {
        match self {
            Kind::QuotientOrder => &[0],
            Kind::QuotientIndex => &[1, 2],
            Kind::SeriesOrder | Kind::Class | Kind::CongruenceScan => &[1],
            _ => &[2],
        }
    }

    /// Whether the check needs a level.
    pub fn leveled(self) -> bool {
        self != Kind::Equal
    }

    /// The expectation assumed when a check states none.
    pub fn default_expect(self) -> Option<&'static str> {
        match self {
            Kind::Equal
            | Kind::CosetMember
            | Kind::PullbackMember
            | Kind::SectionsProduct
            | Kind::Contained
            | Kind::SubgroupEqual
            | Kind::RistEvidence
            | Kind::EmbeddedGenerators
            | Kind::PullbackGenerators
            | Kind::Theorem1 => Some("true"),
            _ => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub id: String,
    pub kind: Kind,
    #[serde(default)]
    pub args: Vec<String>,
    /// Overrides the suite's group file.
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub level: Option<usize>,
    #[serde(default)]
    pub levels: Vec<usize>,
    #[serde(default)]
    pub expect: Option<Value>,
    #[serde(default)]
    pub expect_each: Vec<Value>,
    /// 1-based coordinates for `profile`; all of them by default.
    #[serde(default)]
    pub coords: Vec<usize>,
    /// Generators of `L` for `theorem1`.
    #[serde(default)]
    pub l: Vec<String>,
    /// Hypothesis codes `i`..`v` for `theorem1`.
    #[serde(default)]
    pub hypotheses: Vec<String>,
    #[serde(default)]
    pub note: Option<String>,
}

impl CheckSpec {
    /// The levels to run at; `None` for level-free checks.
    pub fn run_levels(&self) -> Vec<Option<usize>> {
        if !self.kind.leveled() {
            return vec![None];
        }
        if !self.levels.is_empty() {
            return self.levels.iter().map(|&l| Some(l)).collect();
        }
        vec![self.level]
    }

    /// The expected rendering at the `i`-th run level.
    pub fn expected(&self, i: usize) -> Option<String> {
        if !self.expect_each.is_empty() {
            return self.expect_each.get(i).map(render_value);
        }
        match &self.expect {
            Some(v) => Some(render_value(v)),
            None => self.kind.default_expect().map(str::to_string),
        }
    }

    fn validate(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("check without id".into());
        }
        let who = &self.id;
        if !self.kind.arity().contains(&self.args.len()) {
            return Err(format!(
                "check `{who}`: {} takes {:?} arguments, found {}",
                self.kind,
                self.kind.arity(),
                self.args.len()
            ));
        }
        if self.kind.leveled() && self.levels.is_empty() && self.level.is_none() {
            return Err(format!("check `{who}`: {} needs `level` or `levels`", self.kind));
        }
        if !self.levels.is_empty() && self.level.is_some() {
            return Err(format!("check `{who}`: give `level` or `levels`, not both"));
        }
        if !self.expect_each.is_empty() {
            if self.expect.is_some() {
                return Err(format!("check `{who}`: give `expect` or `expect_each`, not both"));
            }
            if self.expect_each.len() != self.run_levels().len() {
                return Err(format!("check `{who}`: expect_each needs one entry per level"));
            }
        } else if self.expect.is_none() && self.kind.default_expect().is_none() {
            return Err(format!("check `{who}`: {} needs an expectation", self.kind));
        }
        if self.kind != Kind::Profile && !self.coords.is_empty() {
            return Err(format!("check `{who}`: coords only apply to profile"));
        }
        if self.kind != Kind::Theorem1 && (!self.l.is_empty() || !self.hypotheses.is_empty()) {
            return Err(format!("check `{who}`: l and hypotheses only apply to theorem1"));
        }
        Ok(())
    }
}

/// Canonical text of an expectation or observation: booleans and integers
/// as written, sequences as `[x, y]`, strings trimmed.
pub fn render_value(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        Value::Sequence(items) => {
            let parts: Vec<String> = items.iter().map(render_value).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Mapping(_) | Value::Tagged(_) => serde_yaml::to_string(v).unwrap_or_default().trim().to_string(),
    }
}

/// Reads an expectation given on the command line.
pub fn parse_expect(text: &str) -> Value {
    serde_yaml::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub name: String,
    pub group: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    /// Directory against which group paths are resolved.
    #[serde(skip)]
    pub base: PathBuf,
    #[serde(skip)]
    pub path: PathBuf,
}

impl Suite {
    pub fn load(path: &Path) -> Result<Suite, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read suite {}: {e}", path.display())))?;
        let mut suite = Suite::from_yaml(&text)
            .map_err(|e| CliError::Usage(format!("malformed suite {}: {e}", path.display())))?;
        suite.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        suite.path = path.to_path_buf();
        Ok(suite)
    }

    pub fn from_yaml(text: &str) -> Result<Suite, String> {
        let suite: Suite = serde_yaml::from_str(text).map_err(|e| e.to_string())?;
        suite.validate()?;
        Ok(suite)
    }

    /// Per-check consistency and unique ids.
    pub fn validate(&self) -> Result<(), String> {
        let suite = self;
        let mut ids = HashSet::new();
        for c in &suite.checks {
            c.validate()?;
            if !ids.insert(c.id.as_str()) {
                return Err(format!("duplicate check id `{}`", c.id));
            }
        }
        Ok(())
    }

    /// The group file of a check, resolved against the suite directory.
    pub fn group_path(&self, check: &CheckSpec) -> PathBuf {
        self.base.join(check.group.as_deref().unwrap_or(&self.group))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_ids() {
        let text = "name: x\ngroup: g.grp\nchecks:\n  - {id: a, kind: equal, args: [a, a]}\n  - {id: a, kind: equal, args: [b, b]}\n";
        assert!(Suite::from_yaml(text).unwrap_err().contains("duplicate"));
    }

    #[test]
    fn numeric_kinds_need_expectations() {
        let text = "name: x\ngroup: g.grp\nchecks:\n  - {id: a, kind: quotient_order, level: 2}\n";
        assert!(Suite::from_yaml(text).is_err());
    }

    #[test]
    fn expectations_render_canonically() {
        assert_eq!(render_value(&parse_expect("[true,false]")), "[true, false]");
        assert_eq!(render_value(&parse_expect("27")), "27");
        assert_eq!(render_value(&parse_expect("Found(2)")), "Found(2)");
    }
}

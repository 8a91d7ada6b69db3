//! Run reports and their text, JSON and CSV renderings. Every timing field
//! is named `timing_ms`; nothing else in a report depends on the clock.

use std::fmt::Write as _;

use serde::Serialize;

/// Ordered from best to worst, so the verdict of a group of results is
/// their maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Error => "ERROR",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Error => 2,
        }
    }
}

/// `exact`: the observation decides the claim about the infinite group
/// (or is a plain fact about the finite quotient). `evidence`: it supports
/// the claim only up to the checked level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Exact,
    Evidence,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelResult {
    pub level: Option<usize>,
    pub verdict: Outcome,
    pub observed: Option<String>,
    pub expected: Option<String>,
    pub basis: Basis,
    pub certificates: Vec<String>,
    pub error: Option<String>,
    pub timing_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub kind: String,
    pub claim: String,
    pub group: String,
    pub definition_hash: String,
    pub verdict: Outcome,
    pub basis: Basis,
    pub levels: Vec<usize>,
    pub note: Option<String>,
    pub results: Vec<LevelResult>,
    pub timing_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub path: String,
    pub group: String,
    pub definition_hash: String,
    pub verdict: Outcome,
    pub checks: Vec<CheckReport>,
    pub timing_ms: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CapsReport {
    pub max_level: usize,
    pub point_cap: usize,
    pub state_cap: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub suites: usize,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub verdict: Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub caps: CapsReport,
    pub suites: Vec<SuiteReport>,
    pub summary: Summary,
    pub timing_ms: f64,
}

/// Column order of the CSV rendering.
pub const CSV_COLUMNS: [&str; 11] = [
    "suite",
    "id",
    "kind",
    "group",
    "definition_hash",
    "verdict",
    "basis",
    "levels",
    "observed",
    "expected",
    "timing_ms",
];

impl RunReport {
    pub fn new(caps: CapsReport, suites: Vec<SuiteReport>, timing_ms: f64) -> RunReport {
        let checks: Vec<&CheckReport> = suites.iter().flat_map(|s| &s.checks).collect();
        let count = |o: Outcome| checks.iter().filter(|c| c.verdict == o).count();
        let verdict = suites.iter().map(|s| s.verdict).max().unwrap_or(Outcome::Pass);
        let summary = Summary {
            suites: suites.len(),
            checks: checks.len(),
            passed: count(Outcome::Pass),
            failed: count(Outcome::Fail),
            errors: count(Outcome::Error),
            verdict,
        };
        RunReport {
            tool: "arbor".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            caps,
            suites,
            summary,
            timing_ms,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.summary.verdict.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for s in &self.suites {
            for c in &s.checks {
                let levels: Vec<String> = c.levels.iter().map(usize::to_string).collect();
                let joined = |f: fn(&LevelResult) -> Option<&String>| {
                    c.results
                        .iter()
                        .map(|r| f(r).cloned().unwrap_or_else(|| "-".into()))
                        .collect::<Vec<_>>()
                        .join("; ")
                };
                let observed = joined(|r| r.observed.as_ref().or(r.error.as_ref()));
                let expected = joined(|r| r.expected.as_ref());
                w.write_record([
                    s.name.as_str(),
                    &c.id,
                    &c.kind,
                    &c.group,
                    &c.definition_hash,
                    &format!("{:?}", c.verdict).to_lowercase(),
                    &format!("{:?}", c.basis).to_lowercase(),
                    &levels.join(" "),
                    &observed,
                    &expected,
                    &format!("{:.3}", c.timing_ms),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let _ = writeln!(out, "suite {} ({}, hash {})", s.name, s.group, short(&s.definition_hash));
            for c in &s.checks {
                write_check(&mut out, c);
            }
        }
        let m = &self.summary;
        let _ = writeln!(
            out,
            "summary: {} checks, {} passed, {} failed, {} errors: {}",
            m.checks,
            m.passed,
            m.failed,
            m.errors,
            m.verdict.label()
        );
        out
    }
}

fn short(hash: &str) -> &str {
    &hash[..hash.len().min(12)]
}

fn write_check(out: &mut String, c: &CheckReport) {
    let contiguous = c.levels.windows(2).all(|w| w[1] == w[0] + 1);
    let levels = match (c.levels.first(), c.levels.last()) {
        (Some(a), Some(b)) if a == b => format!(" level {a}"),
        (Some(a), Some(b)) if contiguous => format!(" levels {a}..{b}"),
        (Some(_), Some(_)) => {
            let all: Vec<String> = c.levels.iter().map(usize::to_string).collect();
            format!(" levels {}", all.join(","))
        }
        _ => String::new(),
    };
    let observed: Vec<String> = c
        .results
        .iter()
        .map(|r| r.observed.clone().unwrap_or_else(|| "error".into()))
        .collect();
    let basis = if c.basis == Basis::Evidence { " (evidence)" } else { "" };
    let _ = writeln!(
        out,
        "  {:<5} {}: {}{levels} -> {}{basis}",
        c.verdict.label(),
        c.id,
        c.claim,
        observed.join(", ")
    );
    let always = matches!(c.kind.as_str(), "congruence_scan" | "theorem1");
    for r in &c.results {
        let at = r.level.map(|l| format!("level {l}: ")).unwrap_or_default();
        if let Some(e) = &r.error {
            let _ = writeln!(out, "        {at}error: {e}");
            continue;
        }
        if r.verdict == Outcome::Fail {
            let _ = writeln!(
                out,
                "        {at}observed {}, expected {}",
                r.observed.as_deref().unwrap_or("-"),
                r.expected.as_deref().unwrap_or("-")
            );
        }
        if always || r.verdict != Outcome::Pass {
            for cert in &r.certificates {
                let _ = writeln!(out, "        {cert}");
            }
        }
    }
}

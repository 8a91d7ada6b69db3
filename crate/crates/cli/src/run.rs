//! Executes checks against group towers and assembles reports.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use arbor::dsl::{parse, parse_element, parse_subgroup, resolve_capped, ElementExpr, SubgroupExpr};
use arbor::filtration::{tree, Caps, Hypothesis, QuotientStore, Tower, Verdict};
use arbor::Vertex;
use rayon::prelude::*;

use crate::report::{Basis, CapsReport, CheckReport, LevelResult, Outcome, RunReport, SuiteReport};
use crate::suite::{CheckSpec, Kind, Suite};
use crate::CliError;

/// What one check observed at one level.
pub struct Observation {
    pub value: String,
    pub basis: Basis,
    pub certificates: Vec<String>,
}

impl Observation {
    fn exact(value: impl ToString) -> Observation {
        Observation {
            value: value.to_string(),
            basis: Basis::Exact,
            certificates: Vec::new(),
        }
    }
}

/// Reads, parses and resolves a group file.
pub fn load_tower(path: &Path, caps: Caps, store: Option<Arc<dyn QuotientStore>>) -> Result<Tower, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read group file {}: {e}", path.display())))?;
    let defn = parse(&text).map_err(|e| CliError::Input(format!("{}:{e}", path.display())))?;
    let resolved =
        resolve_capped(&defn, caps.state_cap).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let tower = Tower::new(resolved, caps);
    Ok(match store {
        Some(s) => tower.with_store(s),
        None => tower,
    })
}

fn element(tower: &Tower, text: &str) -> arbor::Result<ElementExpr> {
    parse_element(text, &tower.resolved().definition)
}

fn subgroup(tower: &Tower, text: &str) -> arbor::Result<SubgroupExpr> {
    parse_subgroup(text, &tower.resolved().definition)
}

fn need_level(level: Option<usize>) -> arbor::Result<usize> {
    level.ok_or_else(|| arbor::Error::Invalid("check needs a level".into()))
}

fn bools(v: &[bool]) -> String {
    let parts: Vec<String> = v.iter().map(bool::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn hypotheses(spec: &CheckSpec) -> arbor::Result<Vec<Hypothesis>> {
    if spec.hypotheses.is_empty() {
        return Ok(if spec.l.is_empty() {
            vec![Hypothesis::Branch, Hypothesis::Normal, Hypothesis::Contained]
        } else {
            Hypothesis::ALL.to_vec()
        });
    }
    spec.hypotheses
        .iter()
        .map(|c| Hypothesis::from_code(c).ok_or_else(|| arbor::Error::Invalid(format!("unknown hypothesis `{c}`"))))
        .collect()
}

/// Computes the observed value of `spec` at `level`.
pub fn observe(tower: &Tower, spec: &CheckSpec, level: Option<usize>) -> arbor::Result<Observation> {
    let a = &spec.args;
    Ok(match spec.kind {
        Kind::Equal => {
            let r = tower.resolved();
            let x = r.eval(&element(tower, &a[0])?)?;
            let y = r.eval(&element(tower, &a[1])?)?;
            Observation::exact(x.equal(&y)?)
        }
        Kind::QuotientOrder => Observation::exact(tower.level_quotient(need_level(level)?)?.quotient.order()),
        Kind::QuotientIndex => {
            let n = need_level(level)?;
            let small = subgroup(tower, &a[0])?;
            match a.get(1) {
                None => Observation::exact(tower.quotient_index(&small, n)?),
                Some(big) => {
                    let big = tower.eval_subgroup(&subgroup(tower, big)?, n)?;
                    let small = tower.eval_subgroup(&small, n)?;
                    Observation::exact(arbor::permgroup::index(&big.group, &small.group)?)
                }
            }
        }
        Kind::SeriesOrder => {
            let n = need_level(level)?;
            Observation::exact(tower.eval_subgroup(&subgroup(tower, &a[0])?, n)?.group.order())
        }
        Kind::Class => {
            let n = need_level(level)?;
            match tower.quotient_class(&subgroup(tower, &a[0])?, n)? {
                Some(c) => Observation::exact(c),
                None => Observation::exact("not-nilpotent"),
            }
        }
        Kind::CosetMember => {
            let n = need_level(level)?;
            Observation::exact(tower.coset_member(&element(tower, &a[0])?, &subgroup(tower, &a[1])?, n)?)
        }
        Kind::PullbackMember => {
            let n = need_level(level)?;
            Observation::exact(tower.pullback_member(&element(tower, &a[0])?, &subgroup(tower, &a[1])?, n)?)
        }
        Kind::Profile => {
            let n = need_level(level)?;
            let coords: Vec<usize> = if spec.coords.is_empty() {
                (1..=tower.degree()).collect()
            } else {
                spec.coords.clone()
            };
            let g = element(tower, &a[0])?;
            let h = subgroup(tower, &a[1])?;
            Observation::exact(bools(&tower.section_coset_profile(&g, &h, &coords, n)?))
        }
        Kind::SectionsProduct => {
            let n = need_level(level)?;
            Observation::exact(tower.sections_product_check(&element(tower, &a[0])?, &subgroup(tower, &a[1])?, n)?)
        }
        Kind::Contained | Kind::SubgroupEqual | Kind::RistEvidence => {
            let n = need_level(level)?;
            let x = subgroup(tower, &a[0])?;
            let y = subgroup(tower, &a[1])?;
            let mut certificates = Vec::new();
            if let Some(w) = tower.first_escape(&x, &y, n)? {
                certificates.push(format!("{w} lies in {x} but not in {y} at level {n}"));
            }
            let holds = match spec.kind {
                Kind::Contained => certificates.is_empty(),
                _ => {
                    if let Some(w) = tower.first_escape(&y, &x, n)? {
                        certificates.push(format!("{w} lies in {y} but not in {x} at level {n}"));
                    }
                    certificates.is_empty()
                }
            };
            Observation {
                value: holds.to_string(),
                basis: if spec.kind == Kind::RistEvidence { Basis::Evidence } else { Basis::Exact },
                certificates,
            }
        }
        Kind::EmbeddedGenerators => {
            let n = need_level(level)?;
            if n == 0 {
                return Err(arbor::Error::Invalid("embedding needs level at least 1".into()));
            }
            let d = tower.degree();
            let x = tower.eval_subgroup(&subgroup(tower, &a[0])?, n - 1)?;
            let y = tower.eval_subgroup(&subgroup(tower, &a[1])?, n)?;
            let mut certificates = Vec::new();
            'outer: for (i, g) in x.group.generators().iter().enumerate() {
                for v in Vertex::level_vertices(d, 1) {
                    if !y.group.contains(&tree::embed(g, &v, d, n))? {
                        certificates.push(format!("{} below {v} is not in {} at level {n}", x.describe(i), a[1]));
                        break 'outer;
                    }
                }
            }
            Observation {
                value: certificates.is_empty().to_string(),
                basis: Basis::Exact,
                certificates,
            }
        }
        Kind::PullbackGenerators => {
            let n = need_level(level)?;
            let x = tower.eval_subgroup(&subgroup(tower, &a[0])?, n)?;
            let h = subgroup(tower, &a[1])?;
            let mut certificates = Vec::new();
            for (i, g) in x.group.generators().iter().enumerate() {
                if !tower.pullback_perm(g, &h, n)? {
                    certificates.push(format!("{} has a section outside {h} at level {n}", x.describe(i)));
                    break;
                }
            }
            Observation {
                value: certificates.is_empty().to_string(),
                basis: Basis::Exact,
                certificates,
            }
        }
        Kind::CongruenceScan => {
            let depth = need_level(level)?;
            let report = tower.congruence_scan(&subgroup(tower, &a[0])?, depth)?;
            let (value, basis) = match report.verdict {
                Verdict::Found { n, .. } => (format!("Found({n})"), Basis::Evidence),
                Verdict::NotContainedUpTo(m) => (format!("NotContainedUpTo({m})"), Basis::Exact),
            };
            Observation {
                value,
                basis,
                certificates: report.certificates.iter().map(ToString::to_string).collect(),
            }
        }
        Kind::Theorem1 => {
            let depth = need_level(level)?;
            let r = subgroup(tower, &a[0])?;
            let h = subgroup(tower, &a[1])?;
            let l: Vec<ElementExpr> = spec.l.iter().map(|e| element(tower, e)).collect::<arbor::Result<_>>()?;
            let hyps = hypotheses(spec)?;
            let report = tower.theorem1_check(&r, &h, (!l.is_empty()).then_some(&l[..]), depth, &hyps)?;
            let mut certificates = Vec::new();
            for &hyp in &hyps {
                let checks: Vec<_> = report.checks.iter().filter(|c| c.hypothesis == hyp).collect();
                let tested: usize = checks.iter().map(|c| c.tested).sum();
                match checks.iter().find_map(|c| c.failure.as_ref()) {
                    None => certificates.push(format!(
                        "({}) holds at levels 1..{depth} ({tested} memberships)",
                        hyp.code()
                    )),
                    Some(cert) => certificates.push(format!("({}) {cert}", hyp.code())),
                }
            }
            Observation {
                value: report.pass().to_string(),
                basis: Basis::Evidence,
                certificates,
            }
        }
    })
}

/// Runs one check at its `i`-th level.
pub fn run_level(tower: &Tower, spec: &CheckSpec, i: usize) -> LevelResult {
    let level = spec.run_levels()[i];
    let expected = spec.expected(i);
    let start = Instant::now();
    let outcome = observe(tower, spec, level);
    let timing_ms = start.elapsed().as_secs_f64() * 1000.0;
    match outcome {
        Ok(obs) => LevelResult {
            level,
            // Only report-only scans reach here without an expectation.
            verdict: match expected.as_deref() {
                None => Outcome::Pass,
                Some(x) if x == obs.value => Outcome::Pass,
                Some(_) => Outcome::Fail,
            },
            observed: Some(obs.value),
            expected,
            basis: obs.basis,
            certificates: obs.certificates,
            error: None,
            timing_ms,
        },
        Err(e) => LevelResult {
            level,
            verdict: Outcome::Error,
            observed: None,
            expected,
            basis: Basis::Exact,
            certificates: Vec::new(),
            error: Some(e.to_string()),
            timing_ms,
        },
    }
}

fn claim(spec: &CheckSpec) -> String {
    let mut parts = vec![spec.kind.name().to_string()];
    parts.extend(spec.args.iter().cloned());
    if !spec.coords.is_empty() {
        let c: Vec<String> = spec.coords.iter().map(usize::to_string).collect();
        parts.push(format!("coords {}", c.join(",")));
    }
    if !spec.l.is_empty() {
        parts.push(format!("L = <{}>", spec.l.join(", ")));
    }
    if !spec.hypotheses.is_empty() {
        parts.push(format!("hypotheses {}", spec.hypotheses.join(",")));
    }
    parts.join(" ")
}

/// Settings shared by every run.
#[derive(Clone)]
pub struct Runner {
    pub caps: Caps,
    pub store: Option<Arc<dyn QuotientStore>>,
}

impl Runner {
    pub fn new(caps: Caps) -> Runner {
        Runner { caps, store: None }
    }

    pub fn with_store(mut self, store: Arc<dyn QuotientStore>) -> Runner {
        self.store = Some(store);
        self
    }

    fn caps_report(&self) -> CapsReport {
        CapsReport {
            max_level: self.caps.max_level,
            point_cap: self.caps.point_cap,
            state_cap: self.caps.state_cap,
        }
    }

    /// Runs every check of every suite. Check-level pairs run in parallel;
    /// each group file is loaded once and shared.
    pub fn run(&self, suites: &[Suite]) -> Result<RunReport, CliError> {
        let start = Instant::now();
        let mut towers: BTreeMap<PathBuf, Arc<Tower>> = BTreeMap::new();
        for s in suites {
            let paths = std::iter::once(s.base.join(&s.group)).chain(s.checks.iter().map(|c| s.group_path(c)));
            for p in paths {
                if let Entry::Vacant(slot) = towers.entry(p) {
                    let t = load_tower(slot.key(), self.caps, self.store.clone())?;
                    slot.insert(Arc::new(t));
                }
            }
        }
        let jobs: Vec<(usize, usize, usize)> = suites
            .iter()
            .enumerate()
            .flat_map(|(si, s)| {
                s.checks
                    .iter()
                    .enumerate()
                    .flat_map(move |(ci, c)| (0..c.run_levels().len()).map(move |li| (si, ci, li)))
            })
            .collect();
        let results: Vec<LevelResult> = jobs
            .par_iter()
            .map(|&(si, ci, li)| {
                let s = &suites[si];
                let c = &s.checks[ci];
                run_level(&towers[&s.group_path(c)], c, li)
            })
            .collect();
        let mut results = results.into_iter();
        let mut reports = Vec::new();
        for s in suites {
            let mut checks = Vec::new();
            for c in &s.checks {
                let tower = &towers[&s.group_path(c)];
                let rs: Vec<LevelResult> = results.by_ref().take(c.run_levels().len()).collect();
                checks.push(CheckReport {
                    id: c.id.clone(),
                    kind: c.kind.name().into(),
                    claim: claim(c),
                    group: s.group_path(c).display().to_string(),
                    definition_hash: tower.definition_hash().to_string(),
                    verdict: rs.iter().map(|r| r.verdict).max().unwrap_or(Outcome::Pass),
                    basis: rs.iter().map(|r| r.basis).max().unwrap_or(Basis::Exact),
                    levels: rs.iter().filter_map(|r| r.level).collect(),
                    note: c.note.clone(),
                    timing_ms: rs.iter().map(|r| r.timing_ms).sum(),
                    results: rs,
                });
            }
            let main = s.base.join(&s.group);
            reports.push(SuiteReport {
                name: s.name.clone(),
                path: s.path.display().to_string(),
                group: main.display().to_string(),
                definition_hash: towers[&main].definition_hash().to_string(),
                verdict: checks.iter().map(|c| c.verdict).max().unwrap_or(Outcome::Pass),
                timing_ms: checks.iter().map(|c| c.timing_ms).sum::<f64>(),
                checks,
            });
        }
        Ok(RunReport::new(
            self.caps_report(),
            reports,
            start.elapsed().as_secs_f64() * 1000.0,
        ))
    }
}

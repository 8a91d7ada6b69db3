use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;

use crate::dsl::{ElementExpr, SubgroupExpr};
use crate::error::Result;
use crate::filtration::tower::{describe, Tower};
use crate::filtration::tree;
use crate::filtration::Certificate;
use crate::perm::Permutation;
use crate::permgroup::PermGroup;

/// Word-search budget per witness.
const WORD_BUDGET: usize = 400;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `st(n) ≤ N` at every level up to `verified_up_to`.
    Found { n: usize, verified_up_to: usize },
    /// No `n` below the depth passed.
    NotContainedUpTo(usize),
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub target: SubgroupExpr,
    pub max_level: usize,
    pub verdict: Verdict,
    /// Positive facts for the found `n`, then one escaping element for
    /// every smaller candidate.
    pub certificates: Vec<Certificate>,
}

/// Outcome at one level `l`: the smallest candidate `p` with
/// `st(p)_l ≤ N_l`, and an element of `st(p - 1)_l` outside `N_l`.
struct LevelOutcome {
    level: usize,
    smallest_pass: usize,
    witness: Option<String>,
}

impl Tower {
    /// Searches for the smallest `n < depth` with `st(n)_l ≤ N_l` for all
    /// `l ≤ depth`. Levels are checked in parallel.
    pub fn congruence_scan(&self, target: &SubgroupExpr, depth: usize) -> Result<ScanReport> {
        self.check_level(depth)?;
        let outcomes = (1..=depth)
            .into_par_iter()
            .map(|l| self.scan_level(target, l, depth))
            .collect::<Result<Vec<_>>>()?;
        let passes = |n: usize| outcomes.iter().all(|o| o.level <= n || o.smallest_pass <= n);
        let found = (0..depth).find(|&n| passes(n));
        let mut certificates = Vec::new();
        let limit = found.unwrap_or(depth);
        if let Some(n) = found {
            for o in outcomes.iter().filter(|o| o.level > n) {
                certificates.push(Certificate {
                    claim: format!("stab({n}) <= {target}"),
                    level: o.level,
                    element: None,
                    holds: true,
                });
            }
        }
        for n in 0..limit {
            let o = outcomes
                .iter()
                .find(|o| o.level > n && o.smallest_pass > n)
                .expect("a failing level exists below the verdict");
            certificates.push(Certificate {
                claim: format!("stab({n}) <= {target}"),
                level: o.level,
                element: o.witness.clone(),
                holds: false,
            });
        }
        let verdict = match found {
            Some(n) => Verdict::Found {
                n,
                verified_up_to: depth,
            },
            None => Verdict::NotContainedUpTo(depth),
        };
        Ok(ScanReport {
            target: target.clone(),
            max_level: depth,
            verdict,
            certificates,
        })
    }

    fn scan_level(&self, target: &SubgroupExpr, l: usize, depth: usize) -> Result<LevelOutcome> {
        let n_l = self.eval_subgroup(target, l)?;
        let mut smallest_pass = l;
        let mut witness = None;
        for k in (0..l.min(depth)).rev() {
            let st = self.eval_subgroup(&SubgroupExpr::Stab(k), l)?;
            let escaping = st
                .group
                .generators()
                .iter()
                .find(|g| !n_l.group.contains_unchecked(g))
                .cloned();
            match escaping {
                None => smallest_pass = k,
                Some(fallback) => {
                    let word = self.find_witness(&n_l.group, k, l);
                    witness = Some(word.unwrap_or_else(|| describe(None, &fallback)));
                    break;
                }
            }
        }
        Ok(LevelOutcome {
            level: l,
            smallest_pass,
            witness,
        })
    }

    /// A short word in the generators lying in `st(k)_l` but not in `n`:
    /// generator powers first, then products of at most three letters and
    /// their commutators.
    fn find_witness(&self, n: &PermGroup, k: usize, l: usize) -> Option<String> {
        let d = self.degree();
        let gens = self.generator_perms(l).ok()?;
        let escapes = |p: &Permutation| tree::fixes_level(p, d, l, k) && !n.contains_unchecked(p);
        for (name, p) in gens.iter() {
            let mut e = 1i64;
            for _ in 0..=l {
                let q = p.pow(e);
                if q.is_identity() {
                    break;
                }
                if escapes(&q) {
                    let word = if e == 1 {
                        ElementExpr::id(name)
                    } else {
                        ElementExpr::id(name).pow(e)
                    };
                    return Some(word.to_string());
                }
                e *= d as i64;
            }
        }
        let letters: Vec<(ElementExpr, Permutation)> = gens
            .iter()
            .filter(|(_, p)| !p.is_identity())
            .flat_map(|(name, p)| {
                [
                    (ElementExpr::id(name), p.clone()),
                    (ElementExpr::id(name).inverse(), p.inverse()),
                ]
            })
            .collect();
        let identity = Permutation::identity(d.pow(l as u32));
        let mut seen = HashSet::from([identity.clone()]);
        let mut queue = VecDeque::from([(Vec::<usize>::new(), identity)]);
        let mut words: Vec<(ElementExpr, Permutation)> = Vec::new();
        let mut budget = WORD_BUDGET;
        while let Some((word, p)) = queue.pop_front() {
            if word.len() >= 3 || budget == 0 {
                break;
            }
            for (i, (_, q)) in letters.iter().enumerate() {
                let next = p.then(q);
                if !seen.insert(next.clone()) {
                    continue;
                }
                budget = budget.saturating_sub(1);
                let mut w = word.clone();
                w.push(i);
                let expr = product(w.iter().map(|&j| letters[j].0.clone()).collect());
                if escapes(&next) {
                    return Some(expr.to_string());
                }
                words.push((expr, next.clone()));
                queue.push_back((w, next));
            }
        }
        for (x, p) in &words {
            for (y, q) in &words {
                let c = p.commutator(q);
                if escapes(&c) {
                    return Some(x.clone().commutator(y.clone()).to_string());
                }
            }
        }
        None
    }
}

fn product(mut v: Vec<ElementExpr>) -> ElementExpr {
    if v.len() == 1 {
        v.pop().expect("one letter")
    } else {
        ElementExpr::Product(v)
    }
}

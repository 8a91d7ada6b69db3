use std::fmt;

use rayon::prelude::*;

use crate::dsl::{ElementExpr, SubgroupExpr};
use crate::error::{Error, Result};
use crate::filtration::tower::Tower;
use crate::filtration::tree;
use crate::filtration::Certificate;
use crate::wreath::Vertex;

/// The hypotheses of the branching criterion for the congruence subgroup
/// property, for `R ≥ H ≥ R′ ≥ L` with `L` the pullback of `H × … × H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hypothesis {
    /// `R × … × R ≤ ψ(R)`: each generator of `R`, placed below a
    /// first-level vertex, lies in `R`.
    Branch,
    /// `H` is normal in `G`.
    Normal,
    /// `H ≤ R`.
    Contained,
    /// The supplied `L` generators lie in the pullback of `H × … × H`.
    Pullback,
    /// The supplied `L` generators lie in `R′`.
    InDerived,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 5] = [
        Hypothesis::Branch,
        Hypothesis::Normal,
        Hypothesis::Contained,
        Hypothesis::Pullback,
        Hypothesis::InDerived,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Hypothesis::Branch => "i",
            Hypothesis::Normal => "ii",
            Hypothesis::Contained => "iii",
            Hypothesis::Pullback => "iv",
            Hypothesis::InDerived => "v",
        }
    }

    pub fn from_code(code: &str) -> Option<Hypothesis> {
        Hypothesis::ALL.into_iter().find(|h| h.code() == code)
    }

    fn needs_l(self) -> bool {
        matches!(self, Hypothesis::Pullback | Hypothesis::InDerived)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Debug)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub level: usize,
    /// Number of memberships tested.
    pub tested: usize,
    /// The first failure, if any.
    pub failure: Option<Certificate>,
}

impl HypothesisCheck {
    pub fn pass(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub r: SubgroupExpr,
    pub h: SubgroupExpr,
    pub depth: usize,
    pub checks: Vec<HypothesisCheck>,
}

impl TheoremReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(HypothesisCheck::pass)
    }

    /// Whether `hyp` passed at every level.
    pub fn passes(&self, hyp: Hypothesis) -> bool {
        self.checks.iter().filter(|c| c.hypothesis == hyp).all(HypothesisCheck::pass)
    }
}

impl Tower {
    /// Checks the requested hypotheses at every level `1..=depth`.
    pub fn theorem1_check(
        &self,
        r: &SubgroupExpr,
        h: &SubgroupExpr,
        l_gens: Option<&[ElementExpr]>,
        depth: usize,
        hypotheses: &[Hypothesis],
    ) -> Result<TheoremReport> {
        self.check_level(depth)?;
        if l_gens.is_none() && hypotheses.iter().any(|h| h.needs_l()) {
            return Err(Error::MissingLGenerators);
        }
        let jobs: Vec<(usize, Hypothesis)> = (1..=depth)
            .flat_map(|l| hypotheses.iter().map(move |&h| (l, h)))
            .collect();
        let mut checks = jobs
            .into_par_iter()
            .map(|(l, hyp)| self.check_hypothesis(hyp, r, h, l_gens.unwrap_or(&[]), l))
            .collect::<Result<Vec<_>>>()?;
        checks.sort_by_key(|c| (c.hypothesis, c.level));
        Ok(TheoremReport {
            r: r.clone(),
            h: h.clone(),
            depth,
            checks,
        })
    }

    fn check_hypothesis(
        &self,
        hyp: Hypothesis,
        r: &SubgroupExpr,
        h: &SubgroupExpr,
        l_gens: &[ElementExpr],
        l: usize,
    ) -> Result<HypothesisCheck> {
        let fail = |claim: String, element: String| {
            Some(Certificate {
                claim,
                level: l,
                element: Some(element),
                holds: false,
            })
        };
        let mut tested = 0;
        let mut failure = None;
        match hyp {
            Hypothesis::Branch => {
                let d = self.degree();
                let below = self.eval_subgroup(r, l - 1)?;
                let above = self.eval_subgroup(r, l)?;
                'outer: for (i, g) in below.group.generators().iter().enumerate() {
                    for v in Vertex::level_vertices(d, 1) {
                        tested += 1;
                        if !above.group.contains(&tree::embed(g, &v, d, l))? {
                            failure = fail(
                                format!("{} below {v} lies in {r}", below.describe(i)),
                                format!("{} at {v}", below.describe(i)),
                            );
                            break 'outer;
                        }
                    }
                }
            }
            Hypothesis::Normal => {
                let sub = self.eval_subgroup(h, l)?;
                let gens = self.generator_perms(l)?;
                'outer: for (i, x) in sub.group.generators().iter().enumerate() {
                    for (name, g) in gens.iter() {
                        tested += 1;
                        if !sub.group.contains(&x.conjugate_by(g))? {
                            let word = match sub.label(i) {
                                Some(e) => e.clone().conjugate(ElementExpr::id(name)).to_string(),
                                None => format!("({})^{name}", sub.describe(i)),
                            };
                            failure = fail(format!("{h} is normal"), word);
                            break 'outer;
                        }
                    }
                }
            }
            Hypothesis::Contained => {
                tested = self.eval_subgroup(h, l)?.group.generators().len();
                if let Some(word) = self.first_escape(h, r, l)? {
                    failure = fail(format!("{h} <= {r}"), word);
                }
            }
            Hypothesis::Pullback => {
                for e in l_gens {
                    tested += 1;
                    if !self.pullback_member(e, h, l)? {
                        failure = fail(format!("{e} lies in the pullback of {h}"), e.to_string());
                        break;
                    }
                }
            }
            Hypothesis::InDerived => {
                let derived = SubgroupExpr::Derived(Box::new(r.clone()));
                for e in l_gens {
                    tested += 1;
                    if !self.coset_member(e, &derived, l)? {
                        failure = fail(format!("{e} lies in {derived}"), e.to_string());
                        break;
                    }
                }
            }
        }
        Ok(HypothesisCheck {
            hypothesis: hyp,
            level: l,
            tested,
            failure,
        })
    }
}

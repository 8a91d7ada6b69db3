use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex, OnceLock};

use crate::dsl::{ElementExpr, GroupDefinition, Resolved, SubgroupExpr};
use crate::error::{Error, Result};
use crate::filtration::tree;
use crate::perm::Permutation;
use crate::permgroup::{commutator_seeds, normal_closure_by, Cell, Layout, Origin, PermGroup};
use crate::wreath::{Vertex, DEFAULT_STATE_CAP};

/// Labels larger than this many expression nodes are dropped.
const LABEL_NODES: usize = 40;

/// Resource limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Product-machine states allowed before minimization.
    pub state_cap: usize,
    /// Largest number of leaves of a level quotient.
    pub point_cap: usize,
    /// Deepest level any computation may touch.
    pub max_level: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            state_cap: DEFAULT_STATE_CAP,
            point_cap: 1024,
            max_level: 10,
        }
    }
}

/// Persistent storage for level quotients, keyed by definition hash and
/// level.
pub trait QuotientStore: Send + Sync {
    fn load(&self, key: &str, level: usize) -> Option<PermGroup>;
    fn store(&self, key: &str, level: usize, group: &PermGroup);
}

/// The defined group at one level: its quotient and the truncation of
/// every named generator.
#[derive(Debug)]
pub struct LevelContext {
    pub definition: GroupDefinition,
    pub level: usize,
    pub layout: Layout,
    pub quotient: PermGroup,
    pub element_table: Vec<(String, Permutation)>,
}

/// A subgroup of a level quotient, with a word for each generator when
/// one is known.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: PermGroup,
    pub labels: Vec<Option<ElementExpr>>,
    /// Aligned with `group.normal_generators()`.
    pub normal_labels: Vec<Option<ElementExpr>>,
}

impl Subgroup {
    pub fn label(&self, i: usize) -> Option<&ElementExpr> {
        self.labels.get(i).and_then(Option::as_ref)
    }

    /// Generator `i` as a word if known, else in cycle notation.
    pub fn describe(&self, i: usize) -> String {
        describe(self.label(i), &self.group.generators()[i])
    }
}

pub fn describe(label: Option<&ElementExpr>, p: &Permutation) -> String {
    match label {
        Some(e) => e.to_string(),
        None => p.to_string(),
    }
}

fn nodes(e: &ElementExpr) -> usize {
    match e {
        ElementExpr::One | ElementExpr::Id(_) | ElementExpr::Rooted(_) => 1,
        ElementExpr::Product(v) | ElementExpr::Tuple(v, _) => 1 + v.iter().map(nodes).sum::<usize>(),
        ElementExpr::Power(x, _) => 1 + nodes(x),
        ElementExpr::Commutator(x, y) | ElementExpr::Conjugate(x, y) => 1 + nodes(x) + nodes(y),
    }
}

fn small(e: ElementExpr) -> Option<ElementExpr> {
    (nodes(&e) <= LABEL_NODES).then_some(e)
}

struct Memo<K, V> {
    map: Mutex<HashMap<K, Arc<OnceLock<Result<V>>>>>,
}

impl<K: Eq + Hash + Clone, V: Clone> Memo<K, V> {
    fn new() -> Self {
        Memo {
            map: Mutex::new(HashMap::new()),
        }
    }

    fn get(&self, key: &K, f: impl FnOnce() -> Result<V>) -> Result<V> {
        let cell = {
            let mut map = self.map.lock().expect("memo lock");
            map.entry(key.clone()).or_default().clone()
        };
        cell.get_or_init(f).clone()
    }
}

/// Level quotients of one defined group, with every subgroup evaluated so
/// far. Safe to share between threads.
pub struct Tower {
    resolved: Resolved,
    caps: Caps,
    hash: String,
    store: Option<Arc<dyn QuotientStore>>,
    gens: Memo<usize, Arc<Vec<(String, Permutation)>>>,
    contexts: Memo<usize, Arc<LevelContext>>,
    subgroups: Memo<(usize, String), Arc<Subgroup>>,
}

impl Tower {
    pub fn new(resolved: Resolved, caps: Caps) -> Self {
        let hash = resolved.definition.content_hash();
        Tower {
            resolved,
            caps,
            hash,
            store: None,
            gens: Memo::new(),
            contexts: Memo::new(),
            subgroups: Memo::new(),
        }
    }

    pub fn with_store(mut self, store: Arc<dyn QuotientStore>) -> Self {
        self.store = Some(store);
        self
    }

    pub fn resolved(&self) -> &Resolved {
        &self.resolved
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn degree(&self) -> usize {
        self.resolved.degree()
    }

    pub fn definition_hash(&self) -> &str {
        &self.hash
    }

    pub fn layout(&self, n: usize) -> Layout {
        Layout::tree(self.degree(), n)
    }

    /// Fails if level `n` is beyond the caps.
    pub fn check_level(&self, n: usize) -> Result<()> {
        let d = self.degree();
        let points = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if points > self.caps.point_cap as u128 {
            return Err(Error::PointCapExceeded {
                degree: d,
                level: n,
                points,
                cap: self.caps.point_cap,
            });
        }
        if n > self.caps.max_level {
            return Err(Error::Invalid(format!(
                "level {n} exceeds the maximum level {}",
                self.caps.max_level
            )));
        }
        Ok(())
    }

    /// Truncations of the named generators at level `n`.
    pub fn generator_perms(&self, n: usize) -> Result<Arc<Vec<(String, Permutation)>>> {
        self.check_level(n)?;
        self.gens.get(&n, || {
            self.resolved
                .elements
                .iter()
                .map(|(name, e)| Ok((name.clone(), e.truncate(n)?)))
                .collect::<Result<Vec<_>>>()
                .map(Arc::new)
        })
    }

    fn conjugators(&self, n: usize) -> Result<(Vec<Permutation>, Vec<ElementExpr>)> {
        let gens = self.generator_perms(n)?;
        Ok(gens
            .iter()
            .filter(|(_, p)| !p.is_identity())
            .map(|(name, p)| (p.clone(), ElementExpr::Id(name.clone())))
            .unzip())
    }

    /// The quotient `G / st_G(n)` acting on level `n`.
    pub fn level_quotient(&self, n: usize) -> Result<Arc<LevelContext>> {
        self.check_level(n)?;
        self.contexts.get(&n, || {
            let table = self.generator_perms(n)?;
            let layout = self.layout(n);
            let perms: Vec<Permutation> = table.iter().map(|(_, p)| p.clone()).collect();
            let cached = self.store.as_ref().and_then(|s| s.load(&self.hash, n));
            let quotient = match cached {
                Some(g) if matches_generators(&g, layout, &perms) => g,
                _ => {
                    let g = PermGroup::build_on(layout, &perms)?;
                    if let Some(s) = &self.store {
                        s.store(&self.hash, n, &g);
                    }
                    g
                }
            };
            Ok(Arc::new(LevelContext {
                definition: self.resolved.definition.clone(),
                level: n,
                layout,
                quotient,
                element_table: table.as_ref().clone(),
            }))
        })
    }

    /// The truncation of an element expression at level `n`, computed
    /// homomorphically from the generator truncations.
    pub fn element_perm(&self, e: &ElementExpr, n: usize) -> Result<Permutation> {
        let d = self.degree();
        Ok(match e {
            ElementExpr::One => Permutation::identity(d.pow(n as u32)),
            ElementExpr::Id(name) => self
                .generator_perms(n)?
                .iter()
                .find(|(g, _)| g == name)
                .map(|(_, p)| p.clone())
                .ok_or_else(|| Error::UnresolvedName(name.clone()))?,
            ElementExpr::Product(v) => {
                let mut acc = Permutation::identity(d.pow(n as u32));
                for x in v {
                    acc = acc.then(&self.element_perm(x, n)?);
                }
                acc
            }
            ElementExpr::Power(x, k) => self.element_perm(x, n)?.pow(*k),
            ElementExpr::Commutator(x, y) => {
                self.element_perm(x, n)?.commutator(&self.element_perm(y, n)?)
            }
            ElementExpr::Conjugate(x, g) => {
                self.element_perm(x, n)?.conjugate_by(&self.element_perm(g, n)?)
            }
            ElementExpr::Tuple(v, root) => {
                if n == 0 {
                    return Ok(Permutation::identity(1));
                }
                let sections = v
                    .iter()
                    .map(|x| self.element_perm(x, n - 1))
                    .collect::<Result<Vec<_>>>()?;
                let root = root.clone().unwrap_or_else(|| Permutation::identity(d));
                tree::combine(&sections, &root, d, n)
            }
            ElementExpr::Rooted(p) => {
                if n == 0 {
                    return Ok(Permutation::identity(1));
                }
                let id = Permutation::identity(d.pow(n as u32 - 1));
                tree::combine(&vec![id; d], p, d, n)
            }
        })
    }

    /// The image of a subgroup expression in the level-`n` quotient.
    pub fn eval_subgroup(&self, e: &SubgroupExpr, n: usize) -> Result<Arc<Subgroup>> {
        self.check_level(n)?;
        self.subgroups
            .get(&(n, e.to_string()), || self.compute_subgroup(e, n))
    }

    fn whole(&self, n: usize) -> Result<Subgroup> {
        let ctx = self.level_quotient(n)?;
        let labels: Vec<Option<ElementExpr>> = ctx
            .quotient
            .generators()
            .iter()
            .map(|g| {
                ctx.element_table
                    .iter()
                    .find(|(_, p)| p == g)
                    .map(|(name, _)| ElementExpr::Id(name.clone()))
            })
            .collect();
        let mut group = ctx.quotient.clone();
        let normal: Vec<Permutation> = group.generators().to_vec();
        let normal_labels = labels.clone();
        group.set_normal_generators(normal);
        Ok(Subgroup {
            group,
            labels,
            normal_labels,
        })
    }

    fn closure(
        &self,
        n: usize,
        seeds: Vec<(Permutation, Option<ElementExpr>)>,
    ) -> Result<Subgroup> {
        let (conj, conj_labels) = self.conjugators(n)?;
        let perms: Vec<Permutation> = seeds.iter().map(|(p, _)| p.clone()).collect();
        let group = normal_closure_by(self.layout(n), &conj, &perms);
        let mut labels: Vec<Option<ElementExpr>> = Vec::with_capacity(group.generators().len());
        for o in group.origins() {
            let l = match *o {
                Origin::Seed(i) => seeds[i].1.clone(),
                Origin::Conjugate { of, by } => labels[of]
                    .clone()
                    .and_then(|x| small(x.conjugate(conj_labels[by].clone()))),
            };
            labels.push(l);
        }
        let normal_labels = seeds
            .into_iter()
            .filter(|(p, _)| !p.is_identity())
            .map(|(_, l)| l)
            .collect();
        Ok(Subgroup {
            group,
            labels,
            normal_labels,
        })
    }

    fn commutator(&self, n: usize, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        let a_labels = if a.group.normal_generators().is_some() {
            &a.normal_labels
        } else {
            &a.labels
        };
        let seeds = commutator_seeds(&a.group, &b.group)
            .into_iter()
            .map(|(c, i, j)| {
                let l = match (&a_labels[i], &b.labels[j]) {
                    (Some(x), Some(y)) => small(x.clone().commutator(y.clone())),
                    _ => None,
                };
                (c, l)
            })
            .collect();
        self.closure(n, seeds)
    }

    fn trivial(&self, n: usize) -> Subgroup {
        let mut group = PermGroup::trivial_on(self.layout(n));
        group.set_normal_generators(Vec::new());
        Subgroup {
            group,
            labels: Vec::new(),
            normal_labels: Vec::new(),
        }
    }

    fn from_chain(group: PermGroup) -> Subgroup {
        let labels = vec![None; group.generators().len()];
        Subgroup {
            group,
            labels,
            normal_labels: Vec::new(),
        }
    }

    /// Pointwise stabilizer of level `k` inside the level-`n` quotient.
    pub fn stab_image(&self, n: usize, k: usize) -> Result<Arc<Subgroup>> {
        if k > n {
            return Err(Error::LevelOrder { inner: k, outer: n });
        }
        self.eval_subgroup(&SubgroupExpr::Stab(k), n)
    }

    /// Elements of the level-`n` quotient fixing every leaf outside the
    /// subtree at `v`.
    pub fn rigid_stab(&self, n: usize, v: &Vertex) -> Result<Arc<Subgroup>> {
        v.check(self.degree())?;
        self.eval_subgroup(&SubgroupExpr::Rist(v.clone()), n)
    }

    fn compute_subgroup(&self, e: &SubgroupExpr, n: usize) -> Result<Arc<Subgroup>> {
        let d = self.degree();
        let out = match e {
            SubgroupExpr::Whole => self.whole(n)?,
            SubgroupExpr::Named(name) => {
                let body = self
                    .resolved
                    .definition
                    .subgroup(name)
                    .ok_or_else(|| Error::UnresolvedName(name.clone()))?;
                return self.eval_subgroup(body, n);
            }
            SubgroupExpr::Gens(list) => {
                let perms = list
                    .iter()
                    .map(|x| self.element_perm(x, n))
                    .collect::<Result<Vec<_>>>()?;
                let group = PermGroup::build_on(self.layout(n), &perms)?;
                let labels = group
                    .origins()
                    .iter()
                    .map(|o| match o {
                        Origin::Seed(i) => small(list[*i].clone()),
                        Origin::Conjugate { .. } => None,
                    })
                    .collect();
                Subgroup {
                    group,
                    labels,
                    normal_labels: Vec::new(),
                }
            }
            SubgroupExpr::NormalClosure(list) => {
                let seeds = list
                    .iter()
                    .map(|x| Ok((self.element_perm(x, n)?, small(x.clone()))))
                    .collect::<Result<Vec<_>>>()?;
                self.closure(n, seeds)?
            }
            SubgroupExpr::Derived(x) => {
                let a = self.eval_subgroup(x, n)?;
                self.commutator(n, &a, &a)?
            }
            SubgroupExpr::Gamma(x, i) => {
                if *i == 0 {
                    return Err(Error::GammaIndexZero);
                }
                let base = self.eval_subgroup(x, n)?;
                if *i == 1 {
                    return Ok(base);
                }
                let prev = self.eval_subgroup(&SubgroupExpr::Gamma(x.clone(), i - 1), n)?;
                self.commutator(n, &prev, &base)?
            }
            SubgroupExpr::Join(x, y) => {
                let a = self.eval_subgroup(x, n)?;
                let b = self.eval_subgroup(y, n)?;
                let mut group = a.group.clone();
                let mut labels = a.labels.clone();
                for (k, g) in b.group.generators().iter().enumerate() {
                    if group.extend(g)? {
                        labels.push(b.labels[k].clone());
                    }
                }
                let mut normal_labels = Vec::new();
                match (a.group.normal_generators(), b.group.normal_generators()) {
                    (Some(x), Some(y)) => {
                        group.set_normal_generators(x.iter().chain(y).cloned().collect());
                        normal_labels = a.normal_labels.iter().chain(&b.normal_labels).cloned().collect();
                    }
                    _ => {
                        // Leave the normal generators unset.
                        group = strip_normal(group);
                    }
                }
                Subgroup {
                    group,
                    labels,
                    normal_labels,
                }
            }
            SubgroupExpr::Stab(k) => {
                if *k == 0 {
                    return self.eval_subgroup(&SubgroupExpr::Whole, n);
                }
                if *k >= n {
                    self.trivial(n)
                } else {
                    let g = self.level_quotient(n)?;
                    let count = d.pow(*k as u32) - 1;
                    let cells: Vec<Cell> = self.layout(n).full_base().into_iter().take(count).collect();
                    Self::from_chain(g.quotient.cell_stabilizer(&cells))
                }
            }
            SubgroupExpr::Rist(v) => {
                v.check(d)?;
                if v.is_root() {
                    return self.eval_subgroup(&SubgroupExpr::Whole, n);
                }
                if v.level() >= n {
                    self.trivial(n)
                } else {
                    let g = self.level_quotient(n)?;
                    let vi = v.index(d);
                    let cells: Vec<Cell> = self
                        .layout(n)
                        .full_base()
                        .into_iter()
                        .filter(|c| {
                            !(c.level > v.level() && c.index / d.pow((c.level - v.level()) as u32) == vi)
                        })
                        .collect();
                    Self::from_chain(g.quotient.cell_stabilizer(&cells))
                }
            }
            SubgroupExpr::RistLevel(k) => {
                if *k == 0 {
                    return self.eval_subgroup(&SubgroupExpr::Whole, n);
                }
                if *k >= n {
                    self.trivial(n)
                } else {
                    let mut group = PermGroup::trivial_on(self.layout(n));
                    for v in Vertex::level_vertices(d, *k) {
                        let r = self.eval_subgroup(&SubgroupExpr::Rist(v), n)?;
                        for g in r.group.generators() {
                            group.extend(g)?;
                        }
                    }
                    Self::from_chain(group)
                }
            }
        };
        Ok(Arc::new(out))
    }
}

/// Whether a stored quotient is generated by exactly the given truncations.
fn matches_generators(g: &PermGroup, layout: Layout, perms: &[Permutation]) -> bool {
    g.layout() == layout
        && g.generators().iter().all(|x| perms.contains(x))
        && perms.iter().all(|x| g.contains(x).unwrap_or(false))
}

fn strip_normal(group: PermGroup) -> PermGroup {
    let mut g = group;
    g.clear_normal_generators();
    g
}

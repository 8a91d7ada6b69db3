use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::permgroup::layout::{Cell, Layout};

/// Orbits longer than this get a hash index instead of a linear scan.
const LINEAR_LOOKUP: usize = 16;

/// How a generator of a group entered it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Origin {
    /// The `i`-th permutation passed to the constructor (or the `i`-th seed
    /// of a normal closure).
    Seed(usize),
    /// `generators[of]` conjugated by `ambient.generators[by]`.
    Conjugate { of: usize, by: usize },
}

/// Outcome of a bounded enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Complete(Vec<Permutation>),
    Overflow,
}

#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub(crate) cell: Cell,
    block: u32,
    point: u32,
    /// First leaves of the cells in the orbit; `orbit[0] == point`.
    orbit: Vec<u32>,
    index: Option<HashMap<u32, u32>>,
    /// `trans[i - 1]` maps the base cell onto `orbit[i]`.
    trans: Vec<Permutation>,
    inv: Vec<Permutation>,
    /// Per orbit point: strong generators already paired with it.
    done: Vec<usize>,
}

impl Level {
    fn new(layout: &Layout, cell: Cell) -> Self {
        let point = layout.first_leaf(cell) as u32;
        Level {
            cell,
            block: layout.block_size(cell.level) as u32,
            point,
            orbit: vec![point],
            index: None,
            trans: Vec::new(),
            inv: Vec::new(),
            done: vec![0],
        }
    }

    #[inline]
    fn image(&self, g: &Permutation, x: u32) -> u32 {
        g.images()[x as usize] / self.block * self.block
    }

    #[inline]
    fn find(&self, x: u32) -> Option<usize> {
        match &self.index {
            Some(m) => m.get(&x).map(|&i| i as usize),
            None => self.orbit.iter().position(|&y| y == x),
        }
    }

    fn push(&mut self, x: u32, t: Permutation, done: usize) {
        self.orbit.push(x);
        self.inv.push(t.inverse());
        self.trans.push(t);
        self.done.push(done);
        match &mut self.index {
            Some(m) => {
                m.insert(x, self.orbit.len() as u32 - 1);
            }
            None if self.orbit.len() > LINEAR_LOOKUP => {
                self.index = Some(
                    self.orbit
                        .iter()
                        .enumerate()
                        .map(|(i, &y)| (y, i as u32))
                        .collect(),
                );
            }
            None => {}
        }
    }

    fn reset(&mut self, done: usize) {
        self.orbit.truncate(1);
        self.index = None;
        self.trans.clear();
        self.inv.clear();
        self.done = vec![done];
    }

    pub(crate) fn len(&self) -> usize {
        self.orbit.len()
    }
}

/// A permutation group with a base and strong generating set.
///
/// The points are the leaves of a [`Layout`]; base points are layout cells,
/// so for tree layouts every basic orbit has at most `arity` points. The
/// chain always runs over every cell of the layout's full base, in some
/// order, and is therefore a complete base for any group of layout
/// automorphisms.
#[derive(Clone, Debug)]
pub struct PermGroup {
    layout: Layout,
    generators: Vec<Permutation>,
    origins: Vec<Origin>,
    normal_generators: Option<Vec<Permutation>>,
    levels: Vec<Level>,
    strong: Vec<Permutation>,
    strong_level: Vec<usize>,
}

impl PermGroup {
    pub fn trivial_on(layout: Layout) -> Self {
        Self::empty_with_base(layout, layout.full_base())
    }

    pub fn trivial(degree: usize) -> Self {
        Self::trivial_on(Layout::flat(degree))
    }

    /// Deterministic Schreier–Sims on `degree` points.
    pub fn build(gens: &[Permutation], degree: usize) -> Result<Self> {
        Self::build_on(Layout::flat(degree), gens)
    }

    /// Deterministic Schreier–Sims for a group of layout automorphisms.
    pub fn build_on(layout: Layout, gens: &[Permutation]) -> Result<Self> {
        for g in gens {
            layout.check(g)?;
        }
        let mut group = Self::trivial_on(layout);
        for (i, g) in gens.iter().enumerate() {
            group.extend_with(g, Origin::Seed(i), None);
        }
        Ok(group)
    }

    pub(crate) fn empty_with_base(layout: Layout, base: Vec<Cell>) -> Self {
        PermGroup {
            levels: base.into_iter().map(|c| Level::new(&layout, c)).collect(),
            layout,
            generators: Vec::new(),
            origins: Vec::new(),
            normal_generators: None,
            strong: Vec::new(),
            strong_level: Vec::new(),
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn degree(&self) -> usize {
        self.layout.points()
    }

    /// Generators in insertion order; generators already in the group when
    /// offered are not recorded.
    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }

    /// For normal closures: the seeds whose conjugates generate the group.
    pub fn normal_generators(&self) -> Option<&[Permutation]> {
        self.normal_generators.as_deref()
    }

    pub(crate) fn set_normal_generators(&mut self, seeds: Vec<Permutation>) {
        self.normal_generators = Some(seeds);
    }

    pub(crate) fn clear_normal_generators(&mut self) {
        self.normal_generators = None;
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    /// Base cells with nontrivial basic orbits, in chain order.
    pub fn base(&self) -> Vec<Cell> {
        self.levels
            .iter()
            .filter(|l| l.len() > 1)
            .map(|l| l.cell)
            .collect()
    }

    /// The full chain order, including cells with trivial orbits.
    pub fn chain_cells(&self) -> Vec<Cell> {
        self.levels.iter().map(|l| l.cell).collect()
    }

    /// Basic orbit lengths along [`PermGroup::base`].
    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels
            .iter()
            .filter(|l| l.len() > 1)
            .map(Level::len)
            .collect()
    }

    pub fn order(&self) -> BigUint {
        let mut acc = BigUint::one();
        let mut small: u64 = 1;
        for l in &self.levels {
            let n = l.len() as u64;
            if n == 1 {
                continue;
            }
            match small.checked_mul(n) {
                Some(v) => small = v,
                None => {
                    acc *= small;
                    small = n;
                }
            }
        }
        acc * small
    }

    pub fn is_trivial(&self) -> bool {
        self.strong.is_empty()
    }

    fn check_degree(&self, x: &Permutation) -> Result<()> {
        if x.degree() != self.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                found: x.degree(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: &Permutation) -> Result<bool> {
        self.check_degree(x)?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &Permutation) -> bool {
        let (residue, dropped) = self.sift(x, 0);
        dropped.is_none() && residue.is_identity()
    }

    /// Strips `g` through the chain from level `from`. Returns the residue
    /// and the first level whose base image left the orbit, if any.
    fn sift(&self, g: &Permutation, from: usize) -> (Permutation, Option<usize>) {
        let mut h = g.clone();
        let mut scratch = Permutation::identity(g.degree());
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let img = level.image(&h, level.point);
            if img == level.point {
                continue;
            }
            match level.find(img) {
                Some(i) => {
                    h.then_into(&level.inv[i - 1], &mut scratch);
                    std::mem::swap(&mut h, &mut scratch);
                }
                None => return (h, Some(l)),
            }
        }
        (h, None)
    }

    /// Closes basic orbits `0..=upto` under the strong generator `k`.
    fn grow_orbits(&mut self, k: usize, upto: usize) {
        // New orbit points still owe all of their Schreier generators.
        let done = 0;
        for l in 0..=upto {
            let level = &mut self.levels[l];
            let s = &self.strong[k];
            let old = level.orbit.len();
            for p in 0..old {
                let img = level.image(s, level.orbit[p]);
                if level.find(img).is_none() {
                    let t = match p {
                        0 => s.clone(),
                        _ => level.trans[p - 1].then(s),
                    };
                    level.push(img, t, done);
                }
            }
            // New points must be closed under every generator of this level.
            let mut q = old;
            while q < level.orbit.len() {
                for (j, g) in self.strong.iter().enumerate() {
                    if self.strong_level[j] < l {
                        continue;
                    }
                    let img = level.image(g, level.orbit[q]);
                    if level.find(img).is_none() {
                        let t = level.trans[q - 1].then(g);
                        level.push(img, t, done);
                    }
                }
                q += 1;
            }
        }
    }

    fn add_strong(&mut self, s: Permutation, level: usize) {
        self.strong.push(s);
        self.strong_level.push(level);
        let k = self.strong.len() - 1;
        self.grow_orbits(k, level);
    }

    /// Processes the Schreier generators of level `i`. Returns the level
    /// of a newly added strong generator, if any.
    fn process_level(&mut self, i: usize) -> Option<usize> {
        let mut p = 0;
        while p < self.levels[i].orbit.len() {
            while self.levels[i].done[p] < self.strong.len() {
                let k = self.levels[i].done[p];
                self.levels[i].done[p] += 1;
                let lk = self.strong_level[k];
                if lk < i || (p == 0 && lk > i) {
                    continue;
                }
                let level = &self.levels[i];
                let s = &self.strong[k];
                let img = level.image(s, level.orbit[p]);
                let q = level.find(img).expect("orbit closed under strong generators");
                let mut h = match p {
                    0 => s.clone(),
                    _ => level.trans[p - 1].then(s),
                };
                if q > 0 {
                    h = h.then(&level.inv[q - 1]);
                }
                let (residue, dropped) = self.sift(&h, i + 1);
                if let Some(j) = dropped {
                    self.add_strong(residue, j);
                    return Some(j);
                }
                debug_assert!(residue.is_identity());
            }
            p += 1;
        }
        None
    }

    fn complete(&mut self, start: usize, target: Option<&BigUint>) {
        let mut i = start as isize;
        while i >= 0 {
            match self.process_level(i as usize) {
                Some(j) => {
                    if target.is_some_and(|t| self.order() == *t) {
                        self.mark_done();
                        return;
                    }
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
    }

    fn mark_done(&mut self) {
        let n = self.strong.len();
        for level in &mut self.levels {
            for d in &mut level.done {
                *d = n;
            }
        }
    }

    /// Adds `g` (already checked against the layout) unless it is a member.
    /// Returns whether the group grew.
    pub(crate) fn extend_with(
        &mut self,
        g: &Permutation,
        origin: Origin,
        target: Option<&BigUint>,
    ) -> bool {
        let (residue, dropped) = self.sift(g, 0);
        match dropped {
            Some(j) => {
                self.generators.push(g.clone());
                self.origins.push(origin);
                self.add_strong(residue, j);
                self.complete(j, target);
                true
            }
            None => {
                debug_assert!(residue.is_identity());
                false
            }
        }
    }

    /// Adds a generator to the group.
    pub fn extend(&mut self, g: &Permutation) -> Result<bool> {
        self.layout.check(g)?;
        let i = self.generators.len();
        Ok(self.extend_with(g, Origin::Seed(i), None))
    }

    /// The same group with the chain rebuilt so that `prefix` comes first,
    /// followed by the rest of the layout's full base.
    pub fn with_base_prefix(&self, prefix: &[Cell]) -> PermGroup {
        let chain = self.chain_cells();
        if chain.len() >= prefix.len() && chain[..prefix.len()] == *prefix {
            return self.clone();
        }
        let seen: HashSet<Cell> = prefix.iter().copied().collect();
        let mut base: Vec<Cell> = prefix.to_vec();
        base.extend(self.layout.full_base().into_iter().filter(|c| !seen.contains(c)));
        let order = self.order();
        let mut g = Self::empty_with_base(self.layout, base);
        for s in &self.strong {
            if g.order() == order {
                break;
            }
            let (residue, dropped) = g.sift(s, 0);
            if let Some(j) = dropped {
                g.add_strong(residue, j);
                g.complete(j, Some(&order));
            }
        }
        g.mark_done();
        debug_assert_eq!(g.order(), order);
        g.generators = self.generators.clone();
        g.origins = self.origins.clone();
        g.normal_generators = self.normal_generators.clone();
        g
    }

    /// The subgroup fixing the first `k` chain cells, read off the chain.
    pub(crate) fn chain_stabilizer(&self, k: usize) -> PermGroup {
        let keep: Vec<usize> = (0..self.strong.len())
            .filter(|&j| self.strong_level[j] >= k)
            .collect();
        let strong: Vec<Permutation> = keep.iter().map(|&j| self.strong[j].clone()).collect();
        let strong_level: Vec<usize> = keep.iter().map(|&j| self.strong_level[j]).collect();
        let mut levels = self.levels.clone();
        for level in levels.iter_mut().take(k) {
            level.reset(strong.len());
        }
        for level in levels.iter_mut().skip(k) {
            for d in &mut level.done {
                *d = strong.len();
            }
        }
        PermGroup {
            layout: self.layout,
            origins: (0..strong.len()).map(Origin::Seed).collect(),
            generators: strong.clone(),
            normal_generators: None,
            levels,
            strong,
            strong_level,
        }
    }

    /// Pointwise stabilizer of a set of cells.
    pub fn cell_stabilizer(&self, cells: &[Cell]) -> PermGroup {
        let mut prefix: Vec<Cell> = Vec::new();
        let mut seen = HashSet::new();
        for &c in cells {
            if seen.insert(c) {
                prefix.push(c);
            }
        }
        let rebased = self.with_base_prefix(&prefix);
        rebased.chain_stabilizer(prefix.len())
    }

    /// Uniformly random element: a product of random coset representatives.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.degree());
        for level in self.levels.iter().rev() {
            let i = rng.gen_range(0..level.orbit.len());
            if i > 0 {
                g = g.then(&level.trans[i - 1]);
            }
        }
        g
    }

    /// All elements by breadth-first closure over the generators, or
    /// `Overflow` once more than `cap` are found.
    pub fn enumerate(&self, cap: usize) -> Enumeration {
        let id = Permutation::identity(self.degree());
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        if cap == 0 {
            return Enumeration::Overflow;
        }
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = x.then(g);
                if seen.insert(y.clone()) {
                    if out.len() >= cap {
                        return Enumeration::Overflow;
                    }
                    out.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Enumeration::Complete(out)
    }

    /// Rebuilds a group from a stored base order and strong generating set
    /// without rerunning Schreier–Sims. Used by the cache.
    pub(crate) fn from_parts(
        layout: Layout,
        chain: Vec<Cell>,
        generators: Vec<Permutation>,
        strong: Vec<Permutation>,
    ) -> Result<Self> {
        let present: HashSet<Cell> = chain.iter().copied().collect();
        if present.len() != chain.len() || layout.full_base().iter().any(|c| !present.contains(c)) {
            return Err(Error::Invalid("stored base is not a full base of the layout".into()));
        }
        let mut g = Self::empty_with_base(layout, chain);
        for s in strong {
            layout.check(&s)?;
            let level = g
                .levels
                .iter()
                .position(|l| l.image(&s, l.point) != l.point)
                .ok_or_else(|| Error::Invalid("identity strong generator".into()))?;
            g.strong.push(s);
            g.strong_level.push(level);
            g.grow_orbits(g.strong.len() - 1, level);
        }
        g.mark_done();
        for x in &generators {
            layout.check(x)?;
            if !g.contains_unchecked(x) {
                return Err(Error::Invalid("stored generator fails to sift".into()));
            }
        }
        g.origins = (0..generators.len()).map(Origin::Seed).collect();
        g.generators = generators;
        Ok(g)
    }
}

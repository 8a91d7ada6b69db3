//! Tree automorphisms as states of canonical minimal Mealy machines.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::wreath::machine::{MachineState, MealyMachine};
use crate::wreath::vertex::Vertex;

/// Default limit on product-machine size before minimization.
pub const DEFAULT_STATE_CAP: usize = 100_000;

/// Hard ceiling on the number of leaves a truncation may produce.
pub const MAX_TRUNCATION_POINTS: usize = 1 << 24;

/// An automorphism of the `d`-ary rooted tree given by a state of a finite
/// Mealy machine.
///
/// Elements are always stored in canonical form (see
/// [`MealyMachine::minimize_from`]), so structural equality of two elements
/// coincides with equality of the automorphisms; [`Element::equal`] is the
/// explicit decision procedure.
#[derive(Clone)]
pub struct Element {
    machine: Arc<MealyMachine>,
    state: u32,
}

impl Element {
    pub fn identity(degree: usize) -> Self {
        Element {
            machine: Arc::new(MealyMachine::trivial(degree)),
            state: 0,
        }
    }

    /// The element given by `state` of `machine`, canonicalized.
    pub fn new(machine: &MealyMachine, state: u32) -> Self {
        let (m, root) = machine.minimize_from(state);
        Element {
            machine: Arc::new(m),
            state: root,
        }
    }

    /// Rooted automorphism: permutes the first level, all sections trivial.
    pub fn rooted(perm: Permutation) -> Result<Self> {
        let d = perm.degree();
        Element::from_tuple(&vec![Element::identity(d); d], perm)
    }

    /// The automorphism `(s_1, …, s_d)σ`.
    pub fn from_tuple(sections: &[Element], root: Permutation) -> Result<Self> {
        let d = root.degree();
        if sections.len() != d {
            return Err(Error::DegreeMismatch {
                expected: d,
                found: sections.len(),
            });
        }
        for s in sections {
            s.check_degree(d)?;
        }
        let mut asm = Assembler::new(d);
        let roots: Vec<u32> = sections.iter().map(|s| asm.import(s)).collect();
        let top = asm.push(MachineState {
            perm: root,
            transitions: roots,
        });
        Ok(asm.finish(top))
    }

    pub fn degree(&self) -> usize {
        self.machine.degree()
    }

    pub fn machine(&self) -> &MealyMachine {
        &self.machine
    }

    pub fn state(&self) -> u32 {
        self.state
    }

    /// Number of states of the canonical machine (identity included).
    pub fn state_count(&self) -> usize {
        self.machine.state_count()
    }

    pub fn root_perm(&self) -> &Permutation {
        &self.machine.state(self.state).perm
    }

    pub fn is_identity(&self) -> bool {
        self.state == 0
    }

    fn check_degree(&self, d: usize) -> Result<()> {
        if self.degree() != d {
            return Err(Error::DegreeMismatch {
                expected: d,
                found: self.degree(),
            });
        }
        Ok(())
    }

    /// "Apply `self`, then `other`", with the default state cap.
    pub fn compose(&self, other: &Element) -> Result<Element> {
        self.compose_capped(other, DEFAULT_STATE_CAP)
    }

    /// Product machine on pairs of states, minimized. The pair state
    /// `(p, q)` has root permutation `σ_p` then `σ_q` and section at child
    /// `x` equal to `(p_x, q_{σ_p(x)})`.
    pub fn compose_capped(&self, other: &Element, cap: usize) -> Result<Element> {
        let d = self.degree();
        other.check_degree(d)?;
        if self.is_identity() {
            return Ok(other.clone());
        }
        if other.is_identity() {
            return Ok(self.clone());
        }
        let (m1, m2) = (&*self.machine, &*other.machine);
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        let mut states: Vec<MachineState> = Vec::new();
        let mut intern = |pair: (u32, u32), pairs: &mut Vec<(u32, u32)>| -> Result<u32> {
            if let Some(&i) = index.get(&pair) {
                return Ok(i);
            }
            let i = pairs.len() as u32;
            if pairs.len() >= cap {
                return Err(Error::StateCapExceeded { cap });
            }
            index.insert(pair, i);
            pairs.push(pair);
            Ok(i)
        };
        intern((0, 0), &mut pairs)?;
        let root = intern((self.state, other.state), &mut pairs)?;
        let mut next = 0;
        while next < pairs.len() {
            let (p, q) = pairs[next];
            let sp = m1.state(p);
            let sq = m2.state(q);
            let perm = sp.perm.then(&sq.perm);
            let mut transitions = Vec::with_capacity(d);
            for x in 0..d {
                let pair = (sp.transitions[x], sq.transitions[sp.perm.image(x)]);
                transitions.push(intern(pair, &mut pairs)?);
            }
            states.push(MachineState { perm, transitions });
            next += 1;
        }
        let m = MealyMachine::from_parts_unchecked(d, states);
        Ok(Element::new(&m, root))
    }

    /// State-parallel inverse:
    /// `((g_1..g_d)σ)⁻¹ = (g_{σ⁻¹(1)}⁻¹ .. g_{σ⁻¹(d)}⁻¹)σ⁻¹`.
    pub fn inverse(&self) -> Element {
        if self.is_identity() {
            return self.clone();
        }
        let d = self.degree();
        let states = self
            .machine
            .states()
            .iter()
            .map(|s| {
                let inv = s.perm.inverse();
                MachineState {
                    transitions: (0..d).map(|x| s.transitions[inv.image(x)]).collect(),
                    perm: inv,
                }
            })
            .collect();
        let m = MealyMachine::from_parts_unchecked(d, states);
        Element::new(&m, self.state)
    }

    /// Decides equality by reducing `self · other⁻¹` to the identity state.
    pub fn equal(&self, other: &Element) -> Result<bool> {
        Ok(self.compose(&other.inverse())?.is_identity())
    }

    pub fn pow(&self, exp: i64) -> Result<Element> {
        let mut base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Element::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(acc)
    }

    /// `[self, other] = self⁻¹ other⁻¹ self other`.
    pub fn commutator(&self, other: &Element) -> Result<Element> {
        self.inverse()
            .compose(&other.inverse())?
            .compose(self)?
            .compose(other)
    }

    /// `self^other = other⁻¹ self other`.
    pub fn conjugate_by(&self, other: &Element) -> Result<Element> {
        other.inverse().compose(self)?.compose(other)
    }

    fn walk(&self, v: &Vertex) -> Result<u32> {
        v.check(self.degree())?;
        let mut s = self.state;
        for &x in v.path() {
            s = self.machine.state(s).transitions[x - 1];
        }
        Ok(s)
    }

    /// The section `g_v`.
    pub fn section(&self, v: &Vertex) -> Result<Element> {
        let s = self.walk(v)?;
        if s == self.state {
            return Ok(self.clone());
        }
        Ok(Element::new(&self.machine, s))
    }

    /// The image of a vertex.
    pub fn act(&self, v: &Vertex) -> Result<Vertex> {
        v.check(self.degree())?;
        let mut s = self.state;
        let mut out = Vec::with_capacity(v.level());
        for &x in v.path() {
            let st = self.machine.state(s);
            out.push(st.perm.image(x - 1) + 1);
            s = st.transitions[x - 1];
        }
        Ok(Vertex::new(out))
    }

    /// The permutation induced on the `d^n` vertices of level `n`, indexed
    /// lexicographically.
    pub fn truncate(&self, n: usize) -> Result<Permutation> {
        let d = self.degree();
        let points = (d as u128).pow(n as u32);
        if points > MAX_TRUNCATION_POINTS as u128 {
            return Err(Error::PointCapExceeded {
                degree: d,
                level: n,
                points,
                cap: MAX_TRUNCATION_POINTS,
            });
        }
        let mut images = vec![0u32; points as usize];
        self.fill(self.state, n, 0, 0, &mut images);
        Ok(Permutation::from_images_unchecked(images))
    }

    fn fill(&self, state: u32, depth: usize, src: usize, dst: usize, out: &mut [u32]) {
        if depth == 0 {
            out[src] = dst as u32;
            return;
        }
        if state == 0 {
            let block = self.degree().pow(depth as u32);
            for i in 0..block {
                out[src + i] = (dst + i) as u32;
            }
            return;
        }
        let st = self.machine.state(state);
        let d = self.degree();
        let block = d.pow(depth as u32 - 1);
        for x in 0..d {
            self.fill(
                st.transitions[x],
                depth - 1,
                src + x * block,
                dst + st.perm.image(x) * block,
                out,
            );
        }
    }

    /// The automorphism acting as `self` on the subtree at `v` and
    /// trivially elsewhere.
    pub fn embed_at(&self, v: &Vertex) -> Result<Element> {
        let d = self.degree();
        v.check(d)?;
        if v.is_root() || self.is_identity() {
            return Ok(self.clone());
        }
        let mut asm = Assembler::new(d);
        let mut below = asm.import(self);
        for &x in v.path().iter().rev() {
            let mut transitions = vec![0; d];
            transitions[x - 1] = below;
            below = asm.push(MachineState {
                perm: Permutation::identity(d),
                transitions,
            });
        }
        Ok(asm.finish(below))
    }

    pub fn to_text(&self) -> String {
        self.machine.to_text(self.state)
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.state == other.state
            && (Arc::ptr_eq(&self.machine, &other.machine) || self.machine == other.machine)
    }
}

impl Eq for Element {}

impl std::hash::Hash for Element {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.state.hash(h);
        self.machine.hash(h);
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({} states, root {})", self.state_count(), self.state)
    }
}

/// Disjoint union of imported machines plus fresh states; identity states
/// of imports are redirected to the shared state 0.
pub(crate) struct Assembler {
    degree: usize,
    states: Vec<MachineState>,
    imported: HashMap<*const MealyMachine, u32>,
}

impl Assembler {
    pub(crate) fn new(degree: usize) -> Self {
        Assembler {
            degree,
            states: vec![MachineState::identity(degree)],
            imported: HashMap::new(),
        }
    }

    pub(crate) fn import(&mut self, e: &Element) -> u32 {
        if e.is_identity() {
            return 0;
        }
        let key = Arc::as_ptr(&e.machine);
        let offset = match self.imported.get(&key) {
            Some(&o) => o,
            None => {
                let offset = self.states.len() as u32 - 1;
                for s in &e.machine.states()[1..] {
                    let transitions = s
                        .transitions
                        .iter()
                        .map(|&t| if t == 0 { 0 } else { t + offset })
                        .collect();
                    self.states.push(MachineState {
                        perm: s.perm.clone(),
                        transitions,
                    });
                }
                self.imported.insert(key, offset);
                offset
            }
        };
        e.state + offset
    }

    pub(crate) fn push(&mut self, s: MachineState) -> u32 {
        self.states.push(s);
        self.states.len() as u32 - 1
    }

    pub(crate) fn finish(self, root: u32) -> Element {
        let m = MealyMachine::from_parts_unchecked(self.degree, self.states);
        Element::new(&m, root)
    }
}

//! Compiles the `gen` statements of a definition into one Mealy machine.
//!
//! Tuples (named or anonymous) are the atoms. Every other expression
//! becomes a freely reduced word in atoms and their inverses; a machine
//! state is such a word, its sections the words read off child by child.

use std::collections::{HashMap, VecDeque};

use crate::dsl::ast::{ElementExpr, GroupDefinition};
use crate::dsl::parser::find_unguarded_cycle;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::wreath::{Element, MachineState, MealyMachine, DEFAULT_STATE_CAP};

type Word = Vec<(u32, bool)>;

struct Atom {
    perm: Permutation,
    sections: Vec<Word>,
}

fn push_reduced(w: &mut Word, letter: (u32, bool)) {
    if let Some(&(x, inv)) = w.last() {
        if x == letter.0 && inv != letter.1 {
            w.pop();
            return;
        }
    }
    w.push(letter);
}

fn inverse_word(w: &Word) -> Word {
    w.iter().rev().map(|&(x, inv)| (x, !inv)).collect()
}

struct Compiler<'a> {
    defn: &'a GroupDefinition,
    cap: usize,
    atoms: Vec<Atom>,
    named_atoms: HashMap<&'a str, u32>,
    /// Tuples awaiting section compilation.
    pending: Vec<(u32, &'a [ElementExpr])>,
}

impl<'a> Compiler<'a> {
    fn new_atom(&mut self, perm: Permutation, sections: &'a [ElementExpr]) -> u32 {
        let id = self.atoms.len() as u32;
        self.atoms.push(Atom {
            perm,
            sections: Vec::new(),
        });
        self.pending.push((id, sections));
        id
    }

    fn tuple_atom(&mut self, e: &'a ElementExpr) -> Option<u32> {
        let d = self.defn.degree;
        match e {
            ElementExpr::Tuple(v, root) => Some(self.new_atom(
                root.clone().unwrap_or_else(|| Permutation::identity(d)),
                v.as_slice(),
            )),
            ElementExpr::Rooted(p) => Some(self.new_atom(p.clone(), &[])),
            _ => None,
        }
    }

    fn word(&mut self, e: &'a ElementExpr) -> Result<Word> {
        let mut stack = Vec::new();
        self.word_in(e, &mut stack)
    }

    fn word_in(&mut self, e: &'a ElementExpr, stack: &mut Vec<&'a str>) -> Result<Word> {
        let w = match e {
            ElementExpr::One => Vec::new(),
            ElementExpr::Id(name) => {
                if let Some(&atom) = self.named_atoms.get(name.as_str()) {
                    vec![(atom, false)]
                } else {
                    let body = self
                        .defn
                        .generator(name)
                        .ok_or_else(|| Error::UnresolvedName(name.clone()))?;
                    if stack.contains(&name.as_str()) {
                        return Err(Error::Invalid(format!(
                            "`{name}` refers to itself outside of any tuple"
                        )));
                    }
                    stack.push(name);
                    let w = self.word_in(body, stack)?;
                    stack.pop();
                    w
                }
            }
            ElementExpr::Product(v) => {
                let mut out = Vec::new();
                for x in v {
                    for l in self.word_in(x, stack)? {
                        push_reduced(&mut out, l);
                    }
                }
                out
            }
            ElementExpr::Power(x, k) => {
                let base = self.word_in(x, stack)?;
                let base = if *k < 0 { inverse_word(&base) } else { base };
                let reps = k.unsigned_abs() as usize;
                if base.len().saturating_mul(reps) > self.cap {
                    return Err(Error::StateCapExceeded { cap: self.cap });
                }
                let mut out = Vec::new();
                for _ in 0..reps {
                    for &l in &base {
                        push_reduced(&mut out, l);
                    }
                }
                out
            }
            ElementExpr::Commutator(x, y) => {
                let x = self.word_in(x, stack)?;
                let y = self.word_in(y, stack)?;
                let mut out = Vec::new();
                for w in [inverse_word(&x), inverse_word(&y), x, y] {
                    for l in w {
                        push_reduced(&mut out, l);
                    }
                }
                out
            }
            ElementExpr::Conjugate(x, g) => {
                let x = self.word_in(x, stack)?;
                let g = self.word_in(g, stack)?;
                let mut out = Vec::new();
                for w in [inverse_word(&g), x, g] {
                    for l in w {
                        push_reduced(&mut out, l);
                    }
                }
                out
            }
            ElementExpr::Tuple(..) | ElementExpr::Rooted(_) => {
                vec![(self.tuple_atom(e).expect("tuple"), false)]
            }
        };
        if w.len() > self.cap {
            return Err(Error::StateCapExceeded { cap: self.cap });
        }
        Ok(w)
    }

    fn drain_pending(&mut self) -> Result<()> {
        while let Some((id, sections)) = self.pending.pop() {
            let words = if sections.is_empty() {
                vec![Vec::new(); self.defn.degree]
            } else {
                sections.iter().map(|s| self.word(s)).collect::<Result<Vec<_>>>()?
            };
            self.atoms[id as usize].sections = words;
        }
        Ok(())
    }

    fn letter_perm(&self, (x, inv): (u32, bool)) -> Permutation {
        let p = &self.atoms[x as usize].perm;
        if inv {
            p.inverse()
        } else {
            p.clone()
        }
    }

    /// Root permutation and sections of a word.
    fn expand(&self, w: &Word) -> MachineStateWords {
        let d = self.defn.degree;
        let mut perm = Permutation::identity(d);
        let mut sections: Vec<Word> = vec![Vec::new(); d];
        for (c, section) in sections.iter_mut().enumerate() {
            let mut point = c;
            for &(x, inv) in w {
                let atom = &self.atoms[x as usize];
                let part = if inv {
                    let pre = atom.perm.inverse().image(point);
                    let s = inverse_word(&atom.sections[pre]);
                    point = pre;
                    s
                } else {
                    let s = atom.sections[point].clone();
                    point = atom.perm.image(point);
                    s
                };
                for l in part {
                    push_reduced(section, l);
                }
            }
        }
        for &l in w {
            perm = perm.then(&self.letter_perm(l));
        }
        MachineStateWords { perm, sections }
    }
}

struct MachineStateWords {
    perm: Permutation,
    sections: Vec<Word>,
}

/// A definition together with the machine realizing its generators.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub definition: GroupDefinition,
    /// States: the identity, then the declared generators and their
    /// inverses, then whatever their sections require. Not minimized.
    pub machine: MealyMachine,
    /// Minimized element for every `gen` name, in declaration order.
    pub elements: Vec<(String, Element)>,
    state_cap: usize,
}

impl Resolved {
    pub fn element(&self, name: &str) -> Option<&Element> {
        self.elements.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn degree(&self) -> usize {
        self.definition.degree
    }

    pub fn state_cap(&self) -> usize {
        self.state_cap
    }

    /// Evaluates an element expression with wreath arithmetic.
    pub fn eval(&self, e: &ElementExpr) -> Result<Element> {
        let cap = self.state_cap;
        let d = self.degree();
        Ok(match e {
            ElementExpr::One => Element::identity(d),
            ElementExpr::Id(n) => self
                .element(n)
                .cloned()
                .ok_or_else(|| Error::UnresolvedName(n.clone()))?,
            ElementExpr::Product(v) => {
                let mut acc = Element::identity(d);
                for x in v {
                    acc = acc.compose_capped(&self.eval(x)?, cap)?;
                }
                acc
            }
            ElementExpr::Power(x, k) => {
                let x = self.eval(x)?;
                let mut base = if *k < 0 { x.inverse() } else { x };
                let mut n = k.unsigned_abs();
                let mut acc = Element::identity(d);
                while n > 0 {
                    if n & 1 == 1 {
                        acc = acc.compose_capped(&base, cap)?;
                    }
                    n >>= 1;
                    if n > 0 {
                        base = base.compose_capped(&base, cap)?;
                    }
                }
                acc
            }
            ElementExpr::Commutator(x, y) => {
                let x = self.eval(x)?;
                let y = self.eval(y)?;
                x.inverse()
                    .compose_capped(&y.inverse(), cap)?
                    .compose_capped(&x, cap)?
                    .compose_capped(&y, cap)?
            }
            ElementExpr::Conjugate(x, g) => {
                let x = self.eval(x)?;
                let g = self.eval(g)?;
                g.inverse().compose_capped(&x, cap)?.compose_capped(&g, cap)?
            }
            ElementExpr::Tuple(v, root) => {
                let sections = v.iter().map(|x| self.eval(x)).collect::<Result<Vec<_>>>()?;
                Element::from_tuple(
                    &sections,
                    root.clone().unwrap_or_else(|| Permutation::identity(d)),
                )?
            }
            ElementExpr::Rooted(p) => Element::rooted(p.clone())?,
        })
    }
}

/// Builds the generator machine with the default state cap.
pub fn resolve(defn: &GroupDefinition) -> Result<Resolved> {
    resolve_capped(defn, DEFAULT_STATE_CAP)
}

pub fn resolve_capped(defn: &GroupDefinition, cap: usize) -> Result<Resolved> {
    if let Some(name) = find_unguarded_cycle(&defn.generators) {
        return Err(Error::Invalid(format!(
            "`{name}` refers to itself outside of any tuple"
        )));
    }
    let mut c = Compiler {
        defn,
        cap,
        atoms: Vec::new(),
        named_atoms: HashMap::new(),
        pending: Vec::new(),
    };
    for (name, e) in &defn.generators {
        if let Some(id) = c.tuple_atom(e) {
            c.named_atoms.insert(name.as_str(), id);
        }
    }
    let mut roots: Vec<Word> = Vec::new();
    for (_, e) in &defn.generators {
        roots.push(c.word(e)?);
    }
    c.drain_pending()?;

    // Breadth-first over reachable words; the empty word is state 0.
    let mut index: HashMap<Word, u32> = HashMap::from([(Vec::new(), 0)]);
    let mut order: Vec<Word> = vec![Vec::new()];
    let mut queue = VecDeque::new();
    let mut intern = |w: Word, order: &mut Vec<Word>, queue: &mut VecDeque<u32>| -> Result<u32> {
        if let Some(&i) = index.get(&w) {
            return Ok(i);
        }
        if order.len() >= cap {
            return Err(Error::StateCapExceeded { cap });
        }
        let i = order.len() as u32;
        index.insert(w.clone(), i);
        order.push(w);
        queue.push_back(i);
        Ok(i)
    };
    let mut root_states = Vec::new();
    for w in &roots {
        root_states.push(intern(w.clone(), &mut order, &mut queue)?);
        intern(inverse_word(w), &mut order, &mut queue)?;
    }
    let d = defn.degree;
    let mut states: Vec<MachineState> = vec![MachineState::identity(d)];
    while let Some(i) = queue.pop_front() {
        let expanded = c.expand(&order[i as usize]);
        let mut transitions = Vec::with_capacity(d);
        for s in expanded.sections {
            transitions.push(intern(s, &mut order, &mut queue)?);
        }
        debug_assert_eq!(states.len(), i as usize);
        states.push(MachineState {
            perm: expanded.perm,
            transitions,
        });
    }
    let machine = MealyMachine::new(d, states)?;
    let elements = defn
        .generators
        .iter()
        .zip(&root_states)
        .map(|((n, _), &s)| (n.clone(), Element::new(&machine, s)))
        .collect();
    Ok(Resolved {
        definition: defn.clone(),
        machine,
        elements,
        state_cap: cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parser::{parse, parse_element};
    use crate::wreath::Vertex;

    #[test]
    fn basilica_machine() {
        let d = parse("tree degree 2\ngen a = (1, b)\ngen b = (1, a) @ (1 2)").unwrap();
        let r = resolve(&d).unwrap();
        assert!(r.machine.state_count() >= 5);
        let a = r.element("a").unwrap();
        let b = r.element("b").unwrap();
        assert_eq!(&b.section(&Vertex::new(vec![2])).unwrap(), a);
        assert_eq!(b.truncate(1).unwrap().to_string(), "(1 2)");
        assert!(a.truncate(1).unwrap().is_identity());
        let e = r.eval(&parse_element("[[b, a], a]", &d).unwrap()).unwrap();
        assert!(e.is_identity());
    }

    #[test]
    fn ggs_sections() {
        let d = parse("tree degree 3\ngen a = @ (1 2 3)\ngen b = (a, a, b)").unwrap();
        let r = resolve(&d).unwrap();
        let a = r.element("a").unwrap();
        let b = r.element("b").unwrap();
        assert_eq!(a.truncate(1).unwrap().to_string(), "(1 2 3)");
        for (x, want) in [(1, a), (2, a), (3, b)] {
            assert_eq!(&b.section(&Vertex::new(vec![x])).unwrap(), want);
        }
    }

    #[test]
    fn aliases_and_anonymous_tuples_agree_with_eval() {
        let src = "tree degree 2\ngen a = (1, b)\ngen b = (1, a) @ (1 2)\n\
                   gen c = a * b^-1\ngen x = (c, (b, 1)) @ (1 2)";
        let d = parse(src).unwrap();
        let r = resolve(&d).unwrap();
        for name in ["c", "x"] {
            let direct = r.element(name).unwrap();
            let evaluated = r.eval(d.generator(name).unwrap()).unwrap();
            assert_eq!(direct, &evaluated, "{name}");
        }
    }

    #[test]
    fn state_cap_is_reported() {
        let d = parse("tree degree 2\ngen a = (1, b)\ngen b = (1, a) @ (1 2)\ngen c = (a^1000, 1)").unwrap();
        assert!(matches!(resolve_capped(&d, 50), Err(Error::StateCapExceeded { .. })));
    }
}

//! Finite Mealy machines over the alphabet `{1..d}`.
//!
//! A state is a wreath recursion `(g_1, …, g_d)σ`: a root permutation `σ`
//! and one transition per child, `transitions[x]` being the section at
//! child `x + 1`. State 0 is always the identity.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MachineState {
    pub perm: Permutation,
    pub transitions: Vec<u32>,
}

impl MachineState {
    pub fn identity(degree: usize) -> Self {
        MachineState {
            perm: Permutation::identity(degree),
            transitions: vec![0; degree],
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MealyMachine {
    degree: usize,
    states: Vec<MachineState>,
}

impl MealyMachine {
    pub fn trivial(degree: usize) -> Self {
        MealyMachine {
            degree,
            states: vec![MachineState::identity(degree)],
        }
    }

    pub fn new(degree: usize, states: Vec<MachineState>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::Invalid(format!("tree degree must be at least 2, got {degree}")));
        }
        if states.first() != Some(&MachineState::identity(degree)) {
            return Err(Error::Invalid("state 0 must be the identity".into()));
        }
        for s in &states {
            if s.perm.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: s.perm.degree(),
                });
            }
            if s.transitions.len() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: s.transitions.len(),
                });
            }
            if let Some(&t) = s.transitions.iter().find(|&&t| t as usize >= states.len()) {
                return Err(Error::Invalid(format!("transition to missing state {t}")));
            }
        }
        Ok(MealyMachine { degree, states })
    }

    pub(crate) fn from_parts_unchecked(degree: usize, states: Vec<MachineState>) -> Self {
        debug_assert!(MealyMachine::new(degree, states.clone()).is_ok());
        MealyMachine { degree, states }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: u32) -> &MachineState {
        &self.states[i as usize]
    }

    pub fn states(&self) -> &[MachineState] {
        &self.states
    }

    /// Minimizes the part of the machine reachable from `root` (plus the
    /// identity state) by partition refinement and renumbers it
    /// canonically: identity first, then breadth-first from `root` over
    /// children in order. Equal automorphisms yield identical output.
    pub fn minimize_from(&self, root: u32) -> (MealyMachine, u32) {
        // Reachable states; index 0 stays the identity.
        let mut local: HashMap<u32, u32> = HashMap::new();
        let mut order: Vec<u32> = vec![0];
        local.insert(0, 0);
        let mut queue = VecDeque::from([root]);
        while let Some(s) = queue.pop_front() {
            if local.contains_key(&s) {
                continue;
            }
            local.insert(s, order.len() as u32);
            order.push(s);
            for &t in &self.states[s as usize].transitions {
                if !local.contains_key(&t) {
                    queue.push_back(t);
                }
            }
        }
        let n = order.len();
        let trans: Vec<Vec<u32>> = order
            .iter()
            .map(|&s| {
                self.states[s as usize]
                    .transitions
                    .iter()
                    .map(|t| local[t])
                    .collect()
            })
            .collect();

        // Initial partition by root permutation.
        let mut class = vec![0u32; n];
        let mut by_perm: HashMap<&Permutation, u32> = HashMap::new();
        for (i, &s) in order.iter().enumerate() {
            let next = by_perm.len() as u32;
            class[i] = *by_perm.entry(&self.states[s as usize].perm).or_insert(next);
        }
        let mut count = by_perm.len();
        loop {
            let mut sigs: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next_class = vec![0u32; n];
            for i in 0..n {
                let mut sig = Vec::with_capacity(self.degree + 1);
                sig.push(class[i]);
                sig.extend(trans[i].iter().map(|&t| class[t as usize]));
                let k = sigs.len() as u32;
                next_class[i] = *sigs.entry(sig).or_insert(k);
            }
            class = next_class;
            if sigs.len() == count {
                break;
            }
            count = sigs.len();
        }

        // Canonical renumbering.
        let mut rep = vec![u32::MAX; count];
        for i in (0..n).rev() {
            rep[class[i] as usize] = i as u32;
        }
        let mut canon = vec![u32::MAX; count];
        canon[class[0] as usize] = 0;
        let mut out_order = vec![class[0]];
        let root_local = local[&root] as usize;
        let mut queue = VecDeque::from([class[root_local]]);
        while let Some(c) = queue.pop_front() {
            if canon[c as usize] == u32::MAX {
                canon[c as usize] = out_order.len() as u32;
                out_order.push(c);
            }
            let r = rep[c as usize] as usize;
            for &t in &trans[r] {
                let tc = class[t as usize];
                if canon[tc as usize] == u32::MAX {
                    canon[tc as usize] = out_order.len() as u32;
                    out_order.push(tc);
                    queue.push_back(tc);
                }
            }
        }
        let states = out_order
            .iter()
            .map(|&c| {
                let r = rep[c as usize] as usize;
                MachineState {
                    perm: self.states[order[r] as usize].perm.clone(),
                    transitions: trans[r]
                        .iter()
                        .map(|&t| canon[class[t as usize] as usize])
                        .collect(),
                }
            })
            .collect();
        let new_root = canon[class[root_local] as usize];
        (MealyMachine::from_parts_unchecked(self.degree, states), new_root)
    }

    /// One state per line: `state <id>: perm=<cycles> trans=[...]`.
    pub fn to_text(&self, root: u32) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "degree {}", self.degree);
        let _ = writeln!(out, "root {root}");
        for (i, s) in self.states.iter().enumerate() {
            let trans: Vec<String> = s.transitions.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(out, "state {i}: perm={} trans=[{}]", s.perm, trans.join(", "));
        }
        out
    }

    /// Inverse of [`MealyMachine::to_text`].
    pub fn from_text(text: &str) -> Result<(MealyMachine, u32)> {
        let bad = |line: &str| Error::Invalid(format!("malformed machine line {line:?}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let degree: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("degree "))
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| bad("degree"))?;
        let root: u32 = lines
            .next()
            .and_then(|l| l.strip_prefix("root "))
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| bad("root"))?;
        let mut states = Vec::new();
        for line in lines {
            let rest = line.strip_prefix("state ").ok_or_else(|| bad(line))?;
            let (id, rest) = rest.split_once(':').ok_or_else(|| bad(line))?;
            if id.trim().parse::<usize>().ok() != Some(states.len()) {
                return Err(bad(line));
            }
            let rest = rest.trim().strip_prefix("perm=").ok_or_else(|| bad(line))?;
            let (perm, trans) = rest.split_once(" trans=").ok_or_else(|| bad(line))?;
            let perm = Permutation::parse_cycles(degree, perm)?;
            let trans = trans
                .trim()
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| bad(line))?;
            let transitions = trans
                .split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| bad(line)))
                .collect::<Result<Vec<_>>>()?;
            states.push(MachineState { perm, transitions });
        }
        let m = MealyMachine::new(degree, states)?;
        if root as usize >= m.state_count() {
            return Err(bad("root"));
        }
        Ok((m, root))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap() -> Permutation {
        Permutation::parse_cycles(2, "(1 2)").unwrap()
    }

    #[test]
    fn minimization_merges_equivalent_states() {
        // States 1 and 2 are both the "odometer" adding machine.
        let id = MachineState::identity(2);
        let m = MealyMachine::new(
            2,
            vec![
                id,
                MachineState { perm: swap(), transitions: vec![0, 2] },
                MachineState { perm: swap(), transitions: vec![0, 1] },
            ],
        )
        .unwrap();
        let (min, root) = m.minimize_from(1);
        assert_eq!(min.state_count(), 2);
        assert_eq!(root, 1);
        let (again, root2) = min.minimize_from(root);
        assert_eq!(again, min);
        assert_eq!(root2, root);
    }

    #[test]
    fn identity_like_states_collapse_to_zero() {
        let m = MealyMachine::new(
            2,
            vec![
                MachineState::identity(2),
                MachineState { perm: Permutation::identity(2), transitions: vec![1, 0] },
            ],
        )
        .unwrap();
        let (min, root) = m.minimize_from(1);
        assert_eq!(root, 0);
        assert_eq!(min.state_count(), 1);
    }

    #[test]
    fn text_round_trip() {
        let m = MealyMachine::new(
            2,
            vec![
                MachineState::identity(2),
                MachineState { perm: swap(), transitions: vec![0, 1] },
            ],
        )
        .unwrap();
        let text = m.to_text(1);
        assert_eq!(
            text,
            "degree 2\nroot 1\nstate 0: perm=() trans=[0, 0]\nstate 1: perm=(1 2) trans=[0, 1]\n"
        );
        let (back, root) = MealyMachine::from_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(root, 1);
    }

    #[test]
    fn rejects_dangling_transitions() {
        let bad = MealyMachine::new(
            2,
            vec![
                MachineState::identity(2),
                MachineState { perm: swap(), transitions: vec![0, 7] },
            ],
        );
        assert!(bad.is_err());
    }
}

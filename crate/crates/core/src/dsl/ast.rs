use std::fmt;

use sha2::{Digest, Sha256};

use crate::perm::Permutation;
use crate::wreath::Vertex;

/// An element expression. Inverses are `Power(e, -1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElementExpr {
    One,
    Id(String),
    Product(Vec<ElementExpr>),
    Power(Box<ElementExpr>, i64),
    Commutator(Box<ElementExpr>, Box<ElementExpr>),
    /// `x ^ g = g⁻¹ x g`.
    Conjugate(Box<ElementExpr>, Box<ElementExpr>),
    /// `(e_1, …, e_d) @ σ`; an identity root is stored as `None`.
    Tuple(Vec<ElementExpr>, Option<Permutation>),
    /// `@ σ` alone.
    Rooted(Permutation),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SubgroupExpr {
    Whole,
    Gens(Vec<ElementExpr>),
    NormalClosure(Vec<ElementExpr>),
    Derived(Box<SubgroupExpr>),
    Gamma(Box<SubgroupExpr>, usize),
    Join(Box<SubgroupExpr>, Box<SubgroupExpr>),
    Stab(usize),
    Rist(Vertex),
    RistLevel(usize),
    Named(String),
}

/// A parsed group definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDefinition {
    pub degree: usize,
    pub generators: Vec<(String, ElementExpr)>,
    pub subgroups: Vec<(String, SubgroupExpr)>,
}

impl ElementExpr {
    pub fn id(name: &str) -> Self {
        ElementExpr::Id(name.to_string())
    }

    pub fn inverse(self) -> Self {
        ElementExpr::Power(Box::new(self), -1)
    }

    pub fn pow(self, k: i64) -> Self {
        ElementExpr::Power(Box::new(self), k)
    }

    pub fn times(self, other: ElementExpr) -> Self {
        match self {
            ElementExpr::Product(mut v) => {
                v.push(other);
                ElementExpr::Product(v)
            }
            x => ElementExpr::Product(vec![x, other]),
        }
    }

    pub fn commutator(self, other: ElementExpr) -> Self {
        ElementExpr::Commutator(Box::new(self), Box::new(other))
    }

    pub fn conjugate(self, by: ElementExpr) -> Self {
        ElementExpr::Conjugate(Box::new(self), Box::new(by))
    }

    /// Whether the printed form is a single atom (needs no parentheses as
    /// the left side of `^`).
    fn is_atom(&self) -> bool {
        matches!(
            self,
            ElementExpr::One
                | ElementExpr::Id(_)
                | ElementExpr::Commutator(..)
                | ElementExpr::Tuple(..)
                | ElementExpr::Rooted(_)
        )
    }

    /// Identifiers referenced, in order of appearance.
    pub fn identifiers(&self, out: &mut Vec<String>) {
        match self {
            ElementExpr::One | ElementExpr::Rooted(_) => {}
            ElementExpr::Id(n) => out.push(n.clone()),
            ElementExpr::Product(v) | ElementExpr::Tuple(v, _) => {
                v.iter().for_each(|e| e.identifiers(out))
            }
            ElementExpr::Power(e, _) => e.identifiers(out),
            ElementExpr::Commutator(x, y) | ElementExpr::Conjugate(x, y) => {
                x.identifiers(out);
                y.identifiers(out);
            }
        }
    }
}

fn write_atomic(f: &mut fmt::Formatter<'_>, e: &ElementExpr) -> fmt::Result {
    if e.is_atom() {
        write!(f, "{e}")
    } else {
        write!(f, "({e})")
    }
}

fn write_root(f: &mut fmt::Formatter<'_>, p: &Permutation) -> fmt::Result {
    write!(f, "@ {p}")
}

impl fmt::Display for ElementExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementExpr::One => write!(f, "1"),
            ElementExpr::Id(n) => write!(f, "{n}"),
            ElementExpr::Product(v) => {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    match e {
                        ElementExpr::Product(_) => write!(f, "({e})")?,
                        _ => write!(f, "{e}")?,
                    }
                }
                Ok(())
            }
            ElementExpr::Power(e, k) => {
                write_atomic(f, e)?;
                write!(f, "^{k}")
            }
            ElementExpr::Conjugate(e, g) => {
                write_atomic(f, e)?;
                write!(f, "^")?;
                match **g {
                    // `x^1` would read back as a power.
                    ElementExpr::One => write!(f, "(1)"),
                    _ => write_atomic(f, g),
                }
            }
            ElementExpr::Commutator(x, y) => write!(f, "[{x}, {y}]"),
            ElementExpr::Tuple(v, root) => {
                write!(f, "(")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")?;
                if let Some(p) = root {
                    write!(f, " ")?;
                    write_root(f, p)?;
                }
                Ok(())
            }
            ElementExpr::Rooted(p) => write_root(f, p),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, v: &[ElementExpr]) -> fmt::Result {
    for (i, e) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

impl fmt::Display for SubgroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupExpr::Whole => write!(f, "G"),
            SubgroupExpr::Gens(v) => {
                write!(f, "gens(")?;
                write_list(f, v)?;
                write!(f, ")")
            }
            SubgroupExpr::NormalClosure(v) => {
                write!(f, "ncl(")?;
                write_list(f, v)?;
                write!(f, ")")
            }
            SubgroupExpr::Derived(e) => write!(f, "derived({e})"),
            SubgroupExpr::Gamma(e, i) => write!(f, "gamma({e}, {i})"),
            SubgroupExpr::Join(x, y) => write!(f, "join({x}, {y})"),
            SubgroupExpr::Stab(n) => write!(f, "stab({n})"),
            SubgroupExpr::Rist(v) => write!(f, "rist({v})"),
            SubgroupExpr::RistLevel(n) => write!(f, "ristlevel({n})"),
            SubgroupExpr::Named(n) => write!(f, "{n}"),
        }
    }
}

impl GroupDefinition {
    pub fn generator(&self, name: &str) -> Option<&ElementExpr> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn subgroup(&self, name: &str) -> Option<&SubgroupExpr> {
        self.subgroups.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    /// Canonical text; parsing it yields an equal definition.
    pub fn pretty_print(&self) -> String {
        let mut out = format!("tree degree {}\n", self.degree);
        if !self.generators.is_empty() {
            out.push('\n');
        }
        for (name, e) in &self.generators {
            out.push_str(&format!("gen {name} = {e}\n"));
        }
        if !self.subgroups.is_empty() {
            out.push('\n');
        }
        for (name, s) in &self.subgroups {
            out.push_str(&format!("sub {name} = {s}\n"));
        }
        out
    }

    /// SHA-256 of the canonical text, hex encoded. Equal definitions hash
    /// equally regardless of formatting or comments in the source.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.pretty_print().as_bytes()))
    }
}

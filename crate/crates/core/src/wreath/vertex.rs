use std::fmt;

use crate::error::{Error, Result};

/// A vertex of the rooted `d`-ary tree: a word over `{1..d}`, empty for the
/// root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex(Vec<usize>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn new(path: Vec<usize>) -> Self {
        Vertex(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, x: usize) -> Vertex {
        let mut p = self.0.clone();
        p.push(x);
        Vertex(p)
    }

    pub fn concat(&self, other: &Vertex) -> Vertex {
        let mut p = self.0.clone();
        p.extend_from_slice(&other.0);
        Vertex(p)
    }

    pub fn check(&self, degree: usize) -> Result<()> {
        match self.0.iter().find(|&&x| x == 0 || x > degree) {
            Some(&entry) => Err(Error::VertexOutOfRange { entry, degree }),
            None => Ok(()),
        }
    }

    /// 0-based lexicographic index among the `d^level` vertices of its level.
    pub fn index(&self, degree: usize) -> usize {
        self.0.iter().fold(0, |acc, &x| acc * degree + (x - 1))
    }

    pub fn from_index(degree: usize, level: usize, mut index: usize) -> Vertex {
        let mut path = vec![0; level];
        for slot in path.iter_mut().rev() {
            *slot = index % degree + 1;
            index /= degree;
        }
        Vertex(path)
    }

    /// All vertices of a level in lexicographic order.
    pub fn level_vertices(degree: usize, level: usize) -> impl Iterator<Item = Vertex> {
        let count = degree.pow(level as u32);
        (0..count).map(move |i| Vertex::from_index(degree, level, i))
    }

    /// Parses `[1,2]`, `1.2`, `1 2` or `[]`.
    pub fn parse(text: &str) -> Result<Vertex> {
        let t = text.trim().trim_start_matches('[').trim_end_matches(']');
        let mut path = Vec::new();
        for tok in t.split(|c: char| c == ',' || c == '.' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            path.push(
                tok.parse()
                    .map_err(|_| Error::Invalid(format!("bad vertex {text:?}")))?,
            );
        }
        Ok(Vertex(path))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_index() {
        // 1 + sum (path[i]-1) d^(n-1-i), shifted to 0-based.
        assert_eq!(Vertex::new(vec![2, 1, 2]).index(2), 0b101);
        assert_eq!(Vertex::new(vec![3, 1]).index(3), 6);
        for i in 0..27 {
            assert_eq!(Vertex::from_index(3, 3, i).index(3), i);
        }
        assert_eq!(Vertex::root().index(5), 0);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Vertex::parse("[1,2]").unwrap(), Vertex::new(vec![1, 2]));
        assert_eq!(Vertex::parse("1.2").unwrap(), Vertex::new(vec![1, 2]));
        assert_eq!(Vertex::parse("[]").unwrap(), Vertex::root());
        assert!(Vertex::new(vec![3]).check(2).is_err());
    }
}
